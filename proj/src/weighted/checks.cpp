#include "cuspfs/weighted/checks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cuspfs/error.hpp"
#include "cuspfs/parallel.hpp"
#include "cuspfs/weighted/corrections.hpp"
#include "cuspfs/weighted/norms.hpp"

namespace cuspfs::weighted {

using geometry::bundle_norm;
using geometry::TensorField;

Bracket bracket(std::vector<double> ratios) {
    if (ratios.empty()) throw DomainError("bracket of an empty sample");
    std::sort(ratios.begin(), ratios.end());
    Bracket b;
    b.min = ratios.front();
    b.max = ratios.back();
    const std::size_t n = ratios.size();
    b.median = n % 2 ? ratios[n / 2] : 0.5 * (ratios[n / 2 - 1] + ratios[n / 2]);
    b.C = std::max(b.max, 1.0 / b.min);
    return b;
}

double drift(double coarse, double fine) {
    if (coarse == fine) return 0.0;
    return std::abs(fine - coarse) / std::abs(fine);
}

double observed_order(double coarse, double fine) { return std::log2(coarse / fine); }

namespace {

double max_norm(const TensorField& a, const geometry::MetricField& g) {
    return bundle_norm(a, g).max_abs();
}

template <class F>
std::vector<double> per_function(const Corpus& corpus, F&& f) {
    return parallel_map<double>(corpus.size(), std::forward<F>(f));
}

double total(const std::vector<double>& terms) {
    double s = 0.0;
    for (double t : terms) s += t;
    return s;
}

// || sum_i |a_i| ||_{L_q} on a metric, for fields of mixed valence.
double lq_of_sum(const std::vector<TensorField>& parts, const geometry::MetricField& g, double q,
                 const TensorField* weight) {
    TensorField acc(g.grid(), {0, 0});
    for (const auto& p : parts) acc += bundle_norm(p, g);
    if (weight) acc = acc.scaled_by(*weight);
    return geometry::lq_norm(acc, g, q);
}

}  // namespace

std::vector<double> connection_residuals(const CuspDiscretization& d, const Corpus& corpus) {
    const TensorField S = s_tensor(d.g(), d.dlog_rho());
    return per_function(corpus, [&](std::size_t i) {
        const TensorField w = geometry::coordinate_derivative(evaluate(corpus, i, d));
        TensorField r = d.hat_conn().derivative(w) - d.conn().derivative(w);
        r -= geometry::complete_contraction(S, w);
        return max_norm(r, d.ghat());
    });
}

std::vector<double> product_rule_residuals(const CuspDiscretization& d, const Corpus& corpus, double lambda) {
    const TensorField delta = weight_map(TensorField::constant_scalar(d.grid(), 1.0), lambda, d.rho());
    const TensorField ddelta = (lambda * d.dlog_rho()).scaled_by(delta);
    return per_function(corpus, [&](std::size_t i) {
        const TensorField u = evaluate(corpus, i, d);
        TensorField r = d.hat_conn().derivative(u.scaled_by(delta));
        r -= d.hat_conn().derivative(u).scaled_by(delta);
        r -= ddelta.scaled_by(u);
        return max_norm(r, d.ghat());
    });
}

std::vector<double> round_trip_residuals(const CuspDiscretization& d, const Corpus& corpus, int k_max) {
    const CorrectionFamilies fam = correction_families(d.conn(), s_tensor(d.g(), d.dlog_rho()), k_max);
    return per_function(corpus, [&](std::size_t i) {
        const auto derivs = d.conn().iterated(evaluate(corpus, i, d), k_max);
        const auto back = apply_backward(fam, apply_forward(fam, derivs));
        double worst = 0.0;
        for (int k = 0; k <= k_max; ++k) worst = std::max(worst, max_norm(back[k] - derivs[k], d.ghat()));
        return worst;
    });
}

std::vector<double> forward_residuals(const CuspDiscretization& d, const Corpus& corpus, int k_max) {
    const CorrectionFamilies fam = correction_families(d.conn(), s_tensor(d.g(), d.dlog_rho()), k_max);
    return per_function(corpus, [&](std::size_t i) {
        const TensorField u = evaluate(corpus, i, d);
        const auto fwd = apply_forward(fam, d.conn().iterated(u, k_max));
        const auto direct = d.hat_conn().iterated(u, k_max);
        double worst = 0.0;
        for (int k = 0; k <= k_max; ++k) worst = std::max(worst, max_norm(fwd[k] - direct[k], d.ghat()));
        return worst;
    });
}

std::vector<double> equivalence_ratios(const CuspDiscretization& d, const Corpus& corpus, int k, double q) {
    require_corpus(corpus);
    return per_function(corpus, [&](std::size_t i) {
        const TensorField u = evaluate(corpus, i, d);
        return weighted_sobolev_norm(u, d.conn(), d.rho(), {k, 0.0, q}) / sobolev_norm(u, d.hat_conn(), k, q);
    });
}

std::vector<double> trivial_weight_ratios(const CuspDiscretization& d, const Corpus& corpus, int k, double q) {
    require_corpus(corpus);
    const TensorField one = TensorField::constant_scalar(d.grid(), 1.0);
    return per_function(corpus, [&](std::size_t i) {
        const TensorField u = evaluate(corpus, i, d);
        return weighted_sobolev_norm(u, d.conn(), one, {k, 0.0, q}) / sobolev_norm(u, d.conn(), k, q);
    });
}

std::vector<double> isomorphism_ratios(const CuspDiscretization& d, const Corpus& corpus, int k, double q,
                                       double lambda) {
    return per_function(corpus, [&](std::size_t i) {
        const TensorField u = evaluate(corpus, i, d);
        const TensorField pu = weight_map(u, lambda, d.rho());
        return weighted_sobolev_norm(pu, d.conn(), d.rho(), {k, lambda, q}) / sobolev_norm(u, d.hat_conn(), k, q);
    });
}

std::vector<double> commutator_ratios(const CuspDiscretization& d, const Corpus& corpus, int k, double q,
                                      double lambda) {
    const TensorField delta = weight_map(TensorField::constant_scalar(d.grid(), 1.0), lambda, d.rho());
    return per_function(corpus, [&](std::size_t i) {
        const TensorField u = evaluate(corpus, i, d);
        const double lhs = lq_of_sum(d.hat_conn().iterated(u.scaled_by(delta), k), d.ghat(), q, nullptr);
        const double rhs = lq_of_sum(d.hat_conn().iterated(u, k), d.ghat(), q, &delta);
        return lhs / rhs;
    });
}

std::vector<double> commutator_identity_residuals(const CuspDiscretization& d, const Corpus& corpus, int k,
                                                  double lambda) {
    const TensorField delta = weight_map(TensorField::constant_scalar(d.grid(), 1.0), lambda, d.rho());
    const CommutatorFamilies fam = commutator_families(d.hat_conn(), lambda * d.dlog_rho(), k);
    return per_function(corpus, [&](std::size_t i) {
        const TensorField u = evaluate(corpus, i, d);
        const auto direct = d.hat_conn().iterated(u.scaled_by(delta), k);
        const auto hat = d.hat_conn().iterated(u, k);
        double worst = 0.0;
        for (int j = 0; j <= k; ++j)
            worst = std::max(worst, max_norm(direct[j] - apply_commutator(fam, j, delta, hat), d.ghat()));
        return worst;
    });
}

int monotonicity_violations(const CuspDiscretization& d, const Corpus& corpus, int k, double q, double lambda0,
                            double lambda1) {
    if (lambda0 > lambda1) throw DomainError("monotonicity check needs lambda0 <= lambda1");
    const auto flags = per_function(corpus, [&](std::size_t i) {
        const auto derivs = d.conn().iterated(evaluate(corpus, i, d), k);
        const double n0 = total(weighted_terms(derivs, d.g(), d.rho(), {k, lambda0, q}));
        const double n1 = total(weighted_terms(derivs, d.g(), d.rho(), {k, lambda1, q}));
        return n0 <= n1 ? 0.0 : 1.0;
    });
    int count = 0;
    for (double f : flags) count += f > 0 ? 1 : 0;
    return count;
}

EmbeddingSpec::Variant parse_embedding_variant(const std::string& name) {
    if (name == "sobolev") return EmbeddingSpec::Variant::sobolev;
    if (name == "morrey") return EmbeddingSpec::Variant::morrey;
    if (name == "gn") return EmbeddingSpec::Variant::gn;
    throw ConfigError("unknown embedding variant '" + name + "'");
}

void validate_embedding(const EmbeddingSpec& spec, int m) {
    switch (spec.variant) {
        case EmbeddingSpec::Variant::sobolev:
            if (spec.s1 < spec.s0 || spec.s1 > 3 || spec.s0 < 0 || !(spec.q0 >= 1) || !(spec.q1 >= 1))
                throw ConfigError("sobolev embedding needs 0 <= s0 <= s1 <= 3 and q0, q1 >= 1");
            if (spec.s1 - m / spec.q1 < spec.s0 - m / spec.q0)
                throw ConfigError("sobolev embedding needs s1 - m/q1 >= s0 - m/q0");
            if (spec.q1 > spec.q0)
                throw ConfigError("sobolev embedding needs q1 <= q0");
            return;
        case EmbeddingSpec::Variant::morrey:
            if (spec.s1 < 1 || spec.s1 > 3 || spec.s0 < 0 || !(spec.q1 >= 1))
                throw ConfigError("morrey embedding needs 1 <= k <= 3, t >= 0, q >= 1");
            if (!(spec.s0 < spec.s1 - m / spec.q1)) throw ConfigError("morrey embedding needs t < k - m/q");
            return;
        case EmbeddingSpec::Variant::gn:
            if (spec.s0 != 0 || spec.s1 != 2 || spec.q0 != spec.q1)
                throw ConfigError("Gagliardo-Nirenberg check uses s0 = 0, s1 = 2, q0 = q1");
            return;
    }
}

std::vector<double> embedding_ratios(const CuspDiscretization& d, const Corpus& corpus, const EmbeddingSpec& spec) {
    validate_embedding(spec, d.dim());
    const auto& hat = d.hat_conn();
    return per_function(corpus, [&](std::size_t i) {
        const TensorField u = evaluate(corpus, i, d);
        switch (spec.variant) {
            case EmbeddingSpec::Variant::sobolev:
                return sobolev_norm(u, hat, spec.s0, spec.q0) / sobolev_norm(u, hat, spec.s1, spec.q1);
            case EmbeddingSpec::Variant::morrey:
                return sobolev_norm(u, hat, spec.s0, 1.0, true) / sobolev_norm(u, hat, spec.s1, spec.q1);
            case EmbeddingSpec::Variant::gn:
                break;
        }
        const double q = spec.q1;
        return sobolev_norm(u, hat, 1, q) / std::sqrt(sobolev_norm(u, hat, 0, q) * sobolev_norm(u, hat, 2, q));
    });
}

double multiplication_ratio(const CuspDiscretization& d, const TensorField& v, const TensorField& u, int k,
                            double q, double lambda0, double lambda1) {
    if (k < 0 || k > 2) throw DomainError("multiplication check supports k <= 2");
    const double lhs = weighted_sobolev_norm(v.scaled_by(u), d.conn(), d.rho(), {k, lambda0 + lambda1, q});
    const double bv = weighted_sobolev_norm(v, d.conn(), d.rho(), {k, lambda0, q, true});
    const double nu = weighted_sobolev_norm(u, d.conn(), d.rho(), {k, lambda1, q});
    return lhs / (bv * nu);
}

std::vector<double> multiplication_ratios(const CuspDiscretization& d, const Corpus& corpus, int k, double q,
                                          double lambda0, double lambda1) {
    return per_function(corpus, [&](std::size_t i) {
        TensorField v(d.grid(), {0, 0});
        for (std::size_t n = 0; n < v.nodes(); ++n)
            v(n, 0) = std::pow(d.rho().value(n), lambda0) * (1.0 + 0.3 * std::cos(d.s(n) + static_cast<double>(i)));
        return multiplication_ratio(d, v, evaluate(corpus, i, d), k, q, lambda0, lambda1);
    });
}

}  // namespace cuspfs::weighted
