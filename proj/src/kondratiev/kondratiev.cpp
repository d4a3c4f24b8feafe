#include "cuspfs/kondratiev/kondratiev.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cuspfs/error.hpp"
#include "cuspfs/parallel.hpp"
#include "cuspfs/weighted/norms.hpp"

namespace cuspfs::kondratiev {

namespace geo = geometry;

DomainSpec DomainSpec::refined(int level) const {
    if (level < 0) throw DomainError("refinement level must be nonnegative");
    DomainSpec out = *this;
    const std::size_t f = std::size_t{1} << level;
    out.n_s = (n_s - 1) * f + 1;
    out.n_theta = n_theta * f;
    return out;
}

namespace {

cusp::CuspBase domain_base(const DomainSpec& spec) {
    if (!(spec.theta1 > 0) || spec.theta1 > 2.0 * std::numbers::pi + 1e-12)
        throw DomainError("sector angle must lie in (0, 2 pi]");
    if (std::abs(spec.theta1 - 2.0 * std::numbers::pi) < 1e-12) return cusp::CuspBase::circle();
    return cusp::CuspBase::arc(0.0, spec.theta1);
}

void require_order(int k, double q) {
    if (k < 0 || k > 2) throw DomainError("Kondratiev norms are implemented for k <= 2");
    if (!(q >= 1)) throw DomainError("integrability exponent must satisfy q >= 1");
}

}  // namespace

ConicalDomain::ConicalDomain(const DomainSpec& spec)
    : spec_(spec),
      cone_(cusp::CuspCharacteristic::power(1.0), domain_base(spec), cusp::CuspFlavor::cone),
      disc_(cone_, weighted::MeshSpec{spec.s_len, spec.n_s, spec.n_theta, false}),
      glued_(cusp::glue_cusp(cone_, disc_.mesh(), spec.blend, [](const geo::Point& p, std::span<double> c) {
          c[0] = 1.0;
          c[3] = p[0] * p[0];
      })) {}

std::vector<TensorField> cartesian_partials(const ConicalDomain& dom, const std::vector<TensorField>& derivs,
                                            int order) {
    if (order < 0 || order > 2 || static_cast<int>(derivs.size()) <= order)
        throw DomainError("cartesian_partials needs derivatives up to the requested order");
    if (order == 0) return {derivs[0]};
    const auto& grid = *dom.grid();
    const std::size_t count = order == 1 ? 2 : 3;
    std::vector<TensorField> out(count, TensorField(dom.grid(), {0, 0}));
    const auto& d = derivs[static_cast<std::size_t>(order)];
    for (std::size_t n = 0; n < grid.size(); ++n) {
        const auto p = grid.point(n);
        const double r = p[0], c = std::cos(p[1]), s = std::sin(p[1]);
        // Polar components of the Cartesian frame e_x, e_y.
        const double ex[2] = {c, -s / r}, ey[2] = {s, c / r};
        if (order == 1) {
            out[0](n, 0) = d(n, 0) * ex[0] + d(n, 1) * ex[1];
            out[1](n, 0) = d(n, 0) * ey[0] + d(n, 1) * ey[1];
            continue;
        }
        auto hess = [&](const double* a, const double* b) {
            double acc = 0.0;
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) acc += d(n, static_cast<std::size_t>(i * 2 + j)) * a[i] * b[j];
            return acc;
        };
        out[0](n, 0) = hess(ex, ex);
        out[1](n, 0) = hess(ex, ey);
        out[2](n, 0) = hess(ey, ey);
    }
    return out;
}

double kondratiev_norm(const ConicalDomain& dom, const TensorField& u, int k, double a, double q) {
    require_order(k, q);
    const auto derivs = dom.conn().iterated(u, k);
    const auto& g = dom.conn().metric();
    double total = 0.0;
    for (int j = 0; j <= k; ++j) {
        const TensorField w = geo::pow_scalar(dom.delta(), j - a);
        for (const auto& part : cartesian_partials(dom, derivs, j)) total += geo::lq_norm(part.scaled_by(w), g, q);
    }
    return total;
}

double distance_norm(const ConicalDomain& dom, const TensorField& u, int k, double lambda, double q) {
    require_order(k, q);
    return weighted::weighted_sobolev_norm(u, dom.conn(), dom.delta(), {k, lambda, q});
}

std::vector<double> kondratiev_ratios(const ConicalDomain& dom, const weighted::Corpus& corpus, int k, double a,
                                      double q) {
    weighted::require_corpus(corpus);
    return parallel_map<double>(corpus.size(), [&](std::size_t i) {
        const TensorField u = weighted::evaluate(corpus, i, dom.discretization());
        return kondratiev_norm(dom, u, k, a, q) / distance_norm(dom, u, k, a - 2.0 / q, q);
    });
}

std::pair<double, double> cartesian_covariant_bracket(const ConicalDomain& dom, const TensorField& u, int j) {
    const auto derivs = dom.conn().iterated(u, j);
    const auto parts = cartesian_partials(dom, derivs, j);
    const TensorField norm = geo::bundle_norm(derivs[static_cast<std::size_t>(j)], dom.conn().metric());
    const double floor = 1e-8 * norm.max_abs();
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (std::size_t n = 0; n < norm.nodes(); ++n) {
        if (!(norm.value(n) > floor)) continue;
        double sum = 0.0;
        for (const auto& p : parts) sum += std::abs(p.value(n));
        lo = std::min(lo, sum / norm.value(n));
        hi = std::max(hi, sum / norm.value(n));
    }
    return {lo, hi};
}

EquivalenceReport kondratiev_equivalence_report(const DomainSpec& spec, const weighted::Corpus& corpus, int k,
                                                double a, double q) {
    EquivalenceReport out;
    out.coarse = weighted::bracket(kondratiev_ratios(ConicalDomain(spec), corpus, k, a, q));
    const DomainSpec fine = spec.refined(1);
    out.fine = weighted::bracket(kondratiev_ratios(ConicalDomain(fine), corpus, k, a, q));
    DomainSpec alt = fine;
    alt.blend = {0.9 * spec.blend.eps0, std::min(1.0, 1.1 * spec.blend.eps1)};
    out.alternate_blend = weighted::bracket(kondratiev_ratios(ConicalDomain(alt), corpus, k, a, q));
    out.refinement_drift = weighted::drift(out.coarse.C, out.fine.C);
    out.blend_drift = weighted::drift(out.fine.C, out.alternate_blend.C);
    return out;
}

}  // namespace cuspfs::kondratiev
