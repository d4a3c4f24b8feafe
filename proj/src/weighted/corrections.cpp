#include "cuspfs/weighted/corrections.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "cuspfs/error.hpp"

namespace cuspfs::weighted {

using geometry::complete_contraction;
using geometry::int_pow;
using geometry::tensor_product;

TensorField s_tensor(const MetricField& g, const TensorField& dlog_rho) {
    geometry::require_same_grid(g.covariant(), dlog_rho, "s_tensor");
    if (!(dlog_rho.valence() == geometry::Valence{0, 1})) throw ValenceError("s_tensor expects a 1-form");
    const int m = g.dim();
    TensorField S(g.grid(), {1, 2});
    for (std::size_t n = 0; n < S.nodes(); ++n) {
        auto L = dlog_rho.at(n);
        auto gc = g.covariant().at(n);
        auto gi = g.inverse().at(n);
        auto out = S.at(n);
        for (int k = 0; k < m; ++k) {
            double raised = 0.0;
            for (int l = 0; l < m; ++l) raised += gi[k * m + l] * L[l];
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < m; ++j)
                    out[(k * m + i) * m + j] =
                        (k == i ? L[j] : 0.0) + (k == j ? L[i] : 0.0) - gc[i * m + j] * raised;
        }
    }
    return S;
}

TensorField log_gradient(const TensorField& rho) {
    geometry::require_scalar(rho, "log_gradient");
    TensorField logr = rho;
    for (auto& v : logr.raw()) {
        if (!(v > 0.0)) throw DomainError("log_gradient: rho must be positive");
        v = std::log(v);
    }
    return geometry::coordinate_derivative(logr);
}

TensorField identity_operator(const geometry::GridPtr& grid, int k) {
    if (k == 0) return TensorField::constant_scalar(grid, 1.0);
    TensorField id = geometry::identity_tensor(grid);
    TensorField out = id;
    for (int i = 1; i < k; ++i) out = tensor_product(out, id);
    return out;
}

TensorField conformal_operator(const TensorField& S, int k) {
    if (k < 1) throw DomainError("conformal_operator needs k >= 1");
    if (2 * k + 1 > geometry::kMaxRank) throw ValenceError("conformal_operator: valence exceeds the supported rank");
    const int m = S.dim();
    TensorField out(S.grid(), {k, k + 1});
    std::array<int, geometry::kMaxRank> slots{};
    const int rank = 2 * k + 1;
    for (std::size_t n = 0; n < out.nodes(); ++n) {
        auto s = S.at(n);
        auto o = out.at(n);
        for (std::size_t c = 0; c < out.components(); ++c) {
            geometry::component_slots(m, c, std::span<int>(slots.data(), static_cast<std::size_t>(rank)));
            const int* p = slots.data();
            const int* j = slots.data() + k;
            const int l = slots[2 * k];
            double acc = 0.0;
            for (int t = 0; t < k; ++t) {
                bool diag = true;
                for (int r = 0; r < k && diag; ++r)
                    if (r != t && p[r] != j[r]) diag = false;
                if (diag) acc += s[(p[t] * m + l) * m + j[t]];
            }
            o[c] = acc;
        }
    }
    return out;
}

CorrectionFamilies correction_families(const Connection& conn, const TensorField& S, int k_max) {
    if (k_max < 1 || k_max > 3) throw DomainError("correction families support 1 <= k <= 3");
    const auto& grid = conn.metric().grid();
    const TensorField delta = geometry::identity_tensor(grid);
    CorrectionFamilies fam;
    fam.k_max = k_max;
    fam.a.resize(k_max + 1);
    fam.b.resize(k_max + 1);
    // k = 1: scalars have equal first derivatives.
    fam.a[1].push_back(TensorField(grid, {0, 1}));
    for (int k = 1; k < k_max; ++k) {
        const TensorField ak = conformal_operator(S, k);
        auto& next = fam.a[k + 1];
        for (int i = 0; i <= k; ++i) {
            TensorField term(grid, {i, k + 1});
            if (i < k) {
                term += conn.derivative(fam.a[k][i]);
                term += complete_contraction(ak, fam.a[k][i]);
            } else {
                term += ak;
            }
            if (i >= 1) term += tensor_product(fam.a[k][i - 1], delta);
            next.push_back(std::move(term));
        }
    }
    for (int k = 1; k <= k_max; ++k) {
        fam.b[k].resize(k);
        for (int i = 0; i < k; ++i) {
            TensorField bi = -1.0 * fam.a[k][i];
            for (int j = i + 1; j < k; ++j) bi -= complete_contraction(fam.a[k][j], fam.b[j][i]);
            fam.b[k][i] = std::move(bi);
        }
    }
    return fam;
}

namespace {

std::vector<TensorField> apply_family(const std::vector<std::vector<TensorField>>& family, int k_max,
                                      const std::vector<TensorField>& derivs) {
    if (static_cast<int>(derivs.size()) < k_max + 1) throw DomainError("not enough derivatives supplied");
    std::vector<TensorField> out;
    out.push_back(derivs[0]);
    for (int k = 1; k <= k_max; ++k) {
        TensorField acc = derivs[k];
        for (int i = 0; i < k; ++i) acc += complete_contraction(family[k][i], derivs[i]);
        out.push_back(std::move(acc));
    }
    return out;
}

}  // namespace

std::vector<TensorField> apply_forward(const CorrectionFamilies& fam, const std::vector<TensorField>& derivs) {
    return apply_family(fam.a, fam.k_max, derivs);
}

std::vector<TensorField> apply_backward(const CorrectionFamilies& fam, const std::vector<TensorField>& hat_derivs) {
    return apply_family(fam.b, fam.k_max, hat_derivs);
}

double weighted_sup(const TensorField& a, const MetricField& g, const TensorField& rho) {
    const TensorField norm = geometry::bundle_norm(a, g);
    const int e = a.valence().co - a.valence().contra;
    double best = 0.0;
    for (std::size_t n = 0; n < norm.nodes(); ++n) best = std::max(best, std::pow(rho.value(n), e) * norm.value(n));
    return best;
}

CommutatorFamilies commutator_families(const Connection& hat_conn, const TensorField& dlog_delta, int k_max) {
    if (k_max < 0 || k_max > 3) throw DomainError("commutator families support 0 <= k <= 3");
    const auto& grid = hat_conn.metric().grid();
    const TensorField delta = geometry::identity_tensor(grid);
    CommutatorFamilies fam;
    fam.k_max = k_max;
    fam.c.resize(k_max + 1);
    fam.c[0].push_back(TensorField::constant_scalar(grid, 1.0));
    for (int k = 0; k < k_max; ++k) {
        auto& next = fam.c[k + 1];
        for (int i = 0; i <= k + 1; ++i) {
            TensorField term(grid, {i, k + 1});
            if (i <= k) {
                term += hat_conn.derivative(fam.c[k][i]);
                term += tensor_product(fam.c[k][i], dlog_delta);
            }
            if (i >= 1) term += tensor_product(fam.c[k][i - 1], delta);
            next.push_back(std::move(term));
        }
    }
    return fam;
}

TensorField apply_commutator(const CommutatorFamilies& fam, int k, const TensorField& delta,
                             const std::vector<TensorField>& hat_derivs) {
    if (k < 0 || k > fam.k_max) throw DomainError("commutator order out of range");
    TensorField acc(delta.grid(), {0, k});
    for (int i = 0; i <= k; ++i) acc += complete_contraction(fam.c[k][i], hat_derivs[i]);
    return acc.scaled_by(delta);
}

}  // namespace cuspfs::weighted
