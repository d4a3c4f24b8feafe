#include "cuspfs/cusp/glue.hpp"

#include <cmath>

#include "cuspfs/error.hpp"

namespace cuspfs::cusp {

double smooth_step(double x) { return smooth_step_derivative(x, 0); }

double smooth_step_derivative(double x, int order) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return order == 0 ? 1.0 : 0.0;
    const double x2 = x * x, x3 = x2 * x;
    switch (order) {
        case 0: return x3 * x * (35.0 - 84.0 * x + 70.0 * x2 - 20.0 * x3);
        case 1: return 140.0 * x3 * (1.0 - x) * (1.0 - x) * (1.0 - x);
        case 2: return 420.0 * x2 * (1.0 - x) * (1.0 - x) * (1.0 - 2.0 * x);
        case 3: return 840.0 * x * (1.0 - x) * (1.0 - 5.0 * x + 5.0 * x2);
        default: throw DomainError("smooth_step derivative order must be in [0, 3]");
    }
}

GluedManifold glue_cusp(const ModelCusp& Z, const CuspMesh& mesh, BlendSpec blend,
                        const MetricFunction& outer_metric) {
    if (mesh.cylinder) throw DomainError("glue_cusp expects a stretched mesh");
    if (!(blend.eps0 > 0) || !(blend.eps0 < blend.eps1) || blend.eps1 > Z.epsilon())
        throw DomainError("blend radii must satisfy 0 < eps0 < eps1 <= epsilon");
    const auto& R = Z.characteristic();
    const int m = Z.dim();
    const double width = blend.eps1 - blend.eps0;
    TensorField rho(mesh.grid, {0, 0});
    TensorField dlog(mesh.grid, {0, 1});
    TensorField gbar(mesh.grid, {0, 2});
    MetricField gz = Z.metric(mesh);
    std::vector<double> outer(static_cast<std::size_t>(m * m));
    for (std::size_t n = 0; n < rho.nodes(); ++n) {
        const auto p = mesh.grid->point(n);
        const double t = p[0];
        const double x = (t - blend.eps0) / width;
        const double w = smooth_step(x);
        const double dw = smooth_step_derivative(x, 1) / width;
        const double r = R.value(t);
        const double value = (1.0 - w) * r + w;
        rho(n, 0) = value;
        dlog(n, 0) = ((1.0 - w) * R.derivative(t, 1) + dw * (1.0 - r)) / value;
        std::fill(outer.begin(), outer.end(), 0.0);
        outer_metric(p, outer);
        auto dst = gbar.at(n);
        auto src = gz.covariant().at(n);
        for (std::size_t c = 0; c < dst.size(); ++c) dst[c] = (1.0 - w) * src[c] + w * outer[c];
    }
    MetricField gb(std::move(gbar));
    MetricField gh = geometry::conformal_rescale(gb, rho);
    return GluedManifold{mesh, std::move(rho), std::move(dlog), std::move(gb), std::move(gh)};
}

}  // namespace cuspfs::cusp
