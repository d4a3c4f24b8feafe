#include "cuspfs/cusp/model_cusp.hpp"

#include <cmath>
#include <numbers>

#include "cuspfs/error.hpp"
#include "cuspfs/geometry/calculus.hpp"

namespace cuspfs::cusp {

using geometry::Axis;
using geometry::Point;

CuspBase CuspBase::circle() { return CuspBase{Kind::circle, 0.0, 2 * std::numbers::pi}; }

CuspBase CuspBase::arc(double theta0, double theta1) {
    if (!(theta1 > theta0) || theta1 - theta0 >= 2 * std::numbers::pi)
        throw DomainError("arc base needs theta0 < theta1 < theta0 + 2 pi");
    return CuspBase{Kind::arc, theta0, theta1};
}

CuspBase CuspBase::point() { return CuspBase{Kind::point, 0.0, 0.0}; }

ModelCusp::ModelCusp(CuspCharacteristic R, CuspBase base, CuspFlavor flavor, double epsilon)
    : base_(base), flavor_(flavor), epsilon_(epsilon) {
    if (!(epsilon > 0) || epsilon > 1.0) throw DomainError("cusp radius epsilon must lie in (0, 1]");
    if (flavor == CuspFlavor::cone &&
        !(R.kind() == CharacteristicKind::power && R.alpha() == 1.0))
        throw DomainError("a cone requires the characteristic R(t) = t");
    arclength_ = std::make_shared<const ArclengthMap>(std::move(R));
}

Axis ModelCusp::base_axis(std::size_t n_theta) const {
    if (base_.kind == CuspBase::Kind::circle) return Axis::periodic_uniform(0.0, 2 * std::numbers::pi, n_theta);
    return Axis::uniform(base_.theta0, base_.theta1, n_theta);
}

CuspMesh ModelCusp::stretched_mesh(double s_len, std::size_t n_s, std::size_t n_theta) const {
    if (!(s_len > 0) || n_s < 3) throw DomainError("cusp mesh needs s_len > 0 and n_s >= 3");
    const double s0 = (*arclength_)(epsilon_);
    CuspMesh mesh;
    mesh.s.resize(n_s);
    mesh.t.resize(n_s);
    // Increasing t means decreasing s.
    for (std::size_t i = 0; i < n_s; ++i) {
        const double s = s0 + s_len * static_cast<double>(n_s - 1 - i) / static_cast<double>(n_s - 1);
        mesh.s[i] = s;
        mesh.t[i] = i + 1 == n_s ? epsilon_ : arclength_->inverse(s);
    }
    std::vector<Axis> axes{Axis::from_coords(mesh.t)};
    if (base_.dim() == 1) axes.push_back(base_axis(n_theta));
    mesh.grid = geometry::make_grid(std::move(axes));
    return mesh;
}

CuspMesh ModelCusp::cylinder_mesh(double s_len, std::size_t n_s, std::size_t n_theta) const {
    if (!(s_len > 0) || n_s < 3) throw DomainError("cusp mesh needs s_len > 0 and n_s >= 3");
    const double s0 = (*arclength_)(epsilon_);
    CuspMesh mesh;
    mesh.cylinder = true;
    mesh.s.resize(n_s);
    mesh.t.resize(n_s);
    for (std::size_t i = 0; i < n_s; ++i) {
        const double s = s0 + s_len * static_cast<double>(i) / static_cast<double>(n_s - 1);
        mesh.s[i] = s;
        mesh.t[i] = i == 0 ? epsilon_ : arclength_->inverse(s);
    }
    std::vector<Axis> axes{Axis::from_coords(mesh.s)};
    if (base_.dim() == 1) axes.push_back(base_axis(n_theta));
    mesh.grid = geometry::make_grid(std::move(axes));
    return mesh;
}

MetricField ModelCusp::metric(const CuspMesh& mesh) const {
    const auto& R = characteristic();
    const int m = dim();
    TensorField g(mesh.grid, {0, 2});
    for (std::size_t n = 0; n < g.nodes(); ++n) {
        const double r = R.value(mesh.t[mesh.radial_index(n)]);
        auto c = g.at(n);
        // Cylinder coordinates: g = R^2 (ds^2 + g_B).
        c[0] = mesh.cylinder ? r * r : 1.0;
        if (m == 2) c[3] = r * r;
    }
    return MetricField(std::move(g));
}

MetricField ModelCusp::embedding_metric(const CuspMesh& mesh) const {
    if (mesh.cylinder) throw DomainError("embedding metric is defined on the stretched mesh");
    const auto& R = characteristic();
    const int m = dim();
    TensorField g(mesh.grid, {0, 2});
    for (std::size_t n = 0; n < g.nodes(); ++n) {
        const Point p = mesh.grid->point(n);
        const double t = p[0];
        auto c = g.at(n);
        if (flavor_ == CuspFlavor::cone) {
            // f(t, theta) = t (cos theta, sin theta).
            c[0] = 1.0;
            if (m == 2) c[3] = t * t;
        } else {
            // f(t, theta) = (t, R cos theta, R sin theta); for a point base f(t) = (t, R).
            const double r = R.value(t), dr = R.derivative(t, 1);
            c[0] = 1.0 + dr * dr;
            if (m == 2) c[3] = r * r;
        }
    }
    return MetricField(std::move(g));
}

TensorField ModelCusp::singularity_function(const CuspMesh& mesh) const {
    const auto& R = characteristic();
    TensorField rho(mesh.grid, {0, 0});
    for (std::size_t n = 0; n < rho.nodes(); ++n) rho(n, 0) = R.value(mesh.t[mesh.radial_index(n)]);
    return rho;
}

TensorField ModelCusp::log_singularity_gradient(const CuspMesh& mesh) const {
    const auto& R = characteristic();
    TensorField a(mesh.grid, {0, 1});
    for (std::size_t n = 0; n < a.nodes(); ++n) {
        const double t = mesh.t[mesh.radial_index(n)];
        // dt/ds = -R, so d/ds log R = -R'(t).
        a(n, 0) = mesh.cylinder ? -R.derivative(t, 1) : R.log_derivative(t);
    }
    return a;
}

double singularity_bound(const ModelCusp& Z, const CuspMesh& mesh, int k) {
    if (k < 0 || k > 3) throw DomainError("singularity bound order must be in [0, 3]");
    MetricField g = Z.metric(mesh);
    geometry::Connection conn(g);
    TensorField a = Z.log_singularity_gradient(mesh);
    for (int i = 0; i < k; ++i) a = conn.derivative(a);
    TensorField norm = geometry::bundle_norm(a, g);
    TensorField r = Z.singularity_function(mesh);
    double best = 0.0;
    for (std::size_t n = 0; n < norm.nodes(); ++n)
        best = std::max(best, std::pow(r.value(n), k + 1) * norm.value(n));
    return best;
}

}  // namespace cuspfs::cusp
