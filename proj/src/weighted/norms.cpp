#include "cuspfs/weighted/norms.hpp"

#include <algorithm>
#include <cmath>

#include "cuspfs/error.hpp"

namespace cuspfs::weighted {

void require_weight(const TensorField& rho) {
    geometry::require_scalar(rho, "weight");
    for (std::size_t n = 0; n < rho.nodes(); ++n) {
        const double r = rho.value(n);
        if (!(r > 0.0) || r > 1.0 + 1e-12)
            throw DomainError("weight must lie in (0, 1] (node " + std::to_string(n) + ")");
    }
}

std::vector<double> weighted_terms(const std::vector<TensorField>& derivs, const MetricField& g,
                                   const TensorField& rho, const WeightedNormSpec& spec) {
    if (spec.k < 0 || spec.k > 3) throw DomainError("weighted norm order must be in [0, 3]");
    if (!spec.sup && !(spec.q >= 1.0)) throw DomainError("weighted norm needs q >= 1");
    if (static_cast<int>(derivs.size()) < spec.k + 1) throw DomainError("not enough derivatives supplied");
    const int m = g.dim();
    const auto& grid = *g.grid();
    std::vector<double> terms;
    for (int i = 0; i <= spec.k; ++i) {
        const TensorField norm = geometry::bundle_norm(derivs[i], g);
        double acc = 0.0;
        if (spec.sup) {
            for (std::size_t n = 0; n < norm.nodes(); ++n)
                acc = std::max(acc, std::pow(rho.value(n), -spec.lambda + i) * norm.value(n));
            terms.push_back(acc);
            continue;
        }
        const double e = -spec.lambda + i - m / spec.q;
        for (std::size_t n = 0; n < norm.nodes(); ++n)
            acc += std::pow(std::pow(rho.value(n), e) * norm.value(n), spec.q) * g.sqrt_det(n) *
                   grid.cell_weight(n);
        terms.push_back(std::pow(acc, 1.0 / spec.q));
    }
    return terms;
}

double weighted_sobolev_norm(const TensorField& u, const Connection& conn, const TensorField& rho,
                             const WeightedNormSpec& spec) {
    geometry::require_scalar(u, "weighted_sobolev_norm");
    require_weight(rho);
    const auto terms = weighted_terms(conn.iterated(u, spec.k), conn.metric(), rho, spec);
    double sum = 0.0;
    for (double t : terms) sum += t;
    return sum;
}

double sobolev_norm(const TensorField& u, const Connection& conn, int k, double q, bool sup) {
    const TensorField one = TensorField::constant_scalar(u.grid(), 1.0);
    // With rho = 1 the weight exponents are irrelevant.
    const auto terms = weighted_terms(conn.iterated(u, k), conn.metric(), one, {k, 0.0, q, sup});
    double sum = 0.0;
    for (double t : terms) sum += t;
    return sum;
}

TensorField weight_map(const TensorField& u, double lambda, const TensorField& rho) {
    geometry::require_scalar(rho, "weight_map");
    geometry::require_same_grid(u, rho, "weight_map");
    TensorField out = u;
    for (std::size_t n = 0; n < out.nodes(); ++n) {
        const double r = rho.value(n);
        if (!(r > 0.0)) throw DomainError("weight_map: rho must be positive");
        const double w = std::pow(r, lambda);
        for (auto& v : out.at(n)) v *= w;
    }
    return out;
}

}  // namespace cuspfs::weighted
