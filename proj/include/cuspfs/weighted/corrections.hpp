#pragma once

#include <vector>

#include "cuspfs/geometry/calculus.hpp"

namespace cuspfs::weighted {

using geometry::Connection;
using geometry::MetricField;
using geometry::TensorField;

/**
 * Difference tensor of the connections of g and g / rho^2, from L = d log rho:
 * S^k_ij = delta^k_i L_j + delta^k_j L_i - g_ij g^kl L_l, so that
 * hat-nabla(omega) - nabla(omega) = S . omega on 1-forms.
 */
TensorField s_tensor(const MetricField& g, const TensorField& dlog_rho);

/// d log rho by finite differences of log rho.
TensorField log_gradient(const TensorField& rho);

/**
 * The operator a^k in T^k_{k+1} with hat-nabla v - nabla v = a^k . v for v in T^0_k:
 * (a^k)^{p_1..p_k}_{j_1..j_k l} = sum_t S^{p_t}_{l j_t} prod_{s != t} delta^{p_s}_{j_s}.
 */
TensorField conformal_operator(const TensorField& S, int k);

/// Identity operator on T^0_k, as a (k, k) field.
TensorField identity_operator(const geometry::GridPtr& grid, int k);

/**
 * Correction families linking the two iterated covariant derivatives:
 *   hat-nabla^k u = nabla^k u + sum_{i<k} a[k][i] . nabla^i u,
 *   nabla^k u = hat-nabla^k u + sum_{i<k} b[k][i] . hat-nabla^i u.
 * a[k][i] and b[k][i] are (i, k) fields; index 0 of the outer vector is unused.
 */
struct CorrectionFamilies {
    int k_max = 0;
    std::vector<std::vector<TensorField>> a;
    std::vector<std::vector<TensorField>> b;
};

/// Recursion a[k+1][i] = nabla a[k][i] + a^k . a[k][i] + a[k][i-1] (x) delta, then b by forward substitution.
CorrectionFamilies correction_families(const Connection& conn, const TensorField& S, int k_max);

/// Right-hand side of the forward relation, orders 0..k_max, from {nabla^i u}.
std::vector<TensorField> apply_forward(const CorrectionFamilies& fam, const std::vector<TensorField>& derivs);
/// Right-hand side of the backward relation, orders 0..k_max, from {hat-nabla^i u}.
std::vector<TensorField> apply_backward(const CorrectionFamilies& fam, const std::vector<TensorField>& hat_derivs);

/// Grid maximum of rho^(k-i) |a|_g for a correction tensor a of type (i, k).
double weighted_sup(const TensorField& a, const MetricField& g, const TensorField& rho);

/**
 * Commutator families for delta = rho^lambda on the regularized manifold:
 *   hat-nabla^k(delta u) = delta sum_{i<=k} c[k][i] . hat-nabla^i u,
 * with c[k][k] the identity. Built from A = d log delta by
 * c[k+1][i] = hat-nabla c[k][i] + c[k][i] (x) A + c[k][i-1] (x) delta.
 */
struct CommutatorFamilies {
    int k_max = 0;
    std::vector<std::vector<TensorField>> c;
};

CommutatorFamilies commutator_families(const Connection& hat_conn, const TensorField& dlog_delta, int k_max);

/// delta sum_i c[k][i] . hat-nabla^i u for one order k.
TensorField apply_commutator(const CommutatorFamilies& fam, int k, const TensorField& delta,
                             const std::vector<TensorField>& hat_derivs);

}  // namespace cuspfs::weighted
