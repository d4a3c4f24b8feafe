#include "cuspfs/geometry/metric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cuspfs/error.hpp"

namespace cuspfs::geometry {

MetricField::MetricField(TensorField g) : g_(std::move(g)) {
    if (!(g_.valence() == Valence{0, 2})) throw ValenceError("metric must be a (0,2) field");
    const int m = g_.dim();
    ginv_ = TensorField(g_.grid(), {2, 0});
    sqrt_det_.resize(g_.nodes());
    for (std::size_t n = 0; n < g_.nodes(); ++n) {
        auto c = g_.at(n);
        auto inv = ginv_.at(n);
        for (double v : c)
            if (!std::isfinite(v)) throw MetricDegeneracyError("metric has non-finite entries", n);
        if (m == 1) {
            if (!(c[0] > 0)) throw MetricDegeneracyError("metric not positive definite", n);
            inv[0] = 1.0 / c[0];
            sqrt_det_[n] = std::sqrt(c[0]);
            continue;
        }
        const double a = c[0], b = c[1], b2 = c[2], d = c[3];
        const double scale = std::max({std::abs(a), std::abs(d), 1e-300});
        if (std::abs(b - b2) > 1e-10 * scale) throw MetricDegeneracyError("metric not symmetric", n);
        const double det = a * d - b * b;
        if (!(a > 0) || !(det > 0) || !(det > 1e-14 * a * d))
            throw MetricDegeneracyError("metric not positive definite", n);
        inv[0] = d / det;
        inv[1] = -b / det;
        inv[2] = -b / det;
        inv[3] = a / det;
        sqrt_det_[n] = std::sqrt(det);
    }
}

MetricField metric_from_function(GridPtr grid,
                                 const std::function<void(const Point&, std::span<double>)>& f) {
    return MetricField(TensorField::from_function(std::move(grid), {0, 2}, f));
}

MetricField flat_metric(GridPtr grid) {
    const int m = grid->dim();
    return metric_from_function(std::move(grid), [m](const Point&, std::span<double> c) {
        for (int i = 0; i < m; ++i) c[i * m + i] = 1.0;
    });
}

MetricField conformal_rescale(const MetricField& g, const TensorField& rho) {
    require_scalar(rho, "conformal_rescale");
    require_same_grid(g.covariant(), rho, "conformal_rescale");
    TensorField out = g.covariant();
    for (std::size_t n = 0; n < out.nodes(); ++n) {
        const double r = rho.value(n);
        if (!(r > 0)) throw MetricDegeneracyError("conformal factor must be positive", n);
        for (auto& v : out.at(n)) v /= r * r;
    }
    return MetricField(std::move(out));
}

std::pair<double, double> metric_equivalence_ratio(const MetricField& g1, const MetricField& g2) {
    require_same_grid(g1.covariant(), g2.covariant(), "metric_equivalence_ratio");
    const int m = g1.dim();
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (std::size_t n = 0; n < g1.grid()->size(); ++n) {
        auto inv = g1.inverse().at(n);
        auto b = g2.covariant().at(n);
        if (m == 1) {
            const double l = inv[0] * b[0];
            lo = std::min(lo, l);
            hi = std::max(hi, l);
            continue;
        }
        // Eigenvalues of g1^{-1} g2, real since both are SPD.
        const double p00 = inv[0] * b[0] + inv[1] * b[2];
        const double p01 = inv[0] * b[1] + inv[1] * b[3];
        const double p10 = inv[2] * b[0] + inv[3] * b[2];
        const double p11 = inv[2] * b[1] + inv[3] * b[3];
        const double tr = p00 + p11;
        const double half_gap = 0.5 * (p00 - p11);
        const double disc = std::sqrt(std::max(0.0, half_gap * half_gap + p01 * p10));
        lo = std::min(lo, 0.5 * tr - disc);
        hi = std::max(hi, 0.5 * tr + disc);
    }
    return {lo, hi};
}

}  // namespace cuspfs::geometry
