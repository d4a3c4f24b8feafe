#pragma once

#include <vector>

#include "cuspfs/geometry/calculus.hpp"

namespace cuspfs::weighted {

using geometry::Connection;
using geometry::MetricField;
using geometry::TensorField;

/// Order k, weight exponent lambda and integrability q; `sup` selects the BC norm.
struct WeightedNormSpec {
    int k = 0;
    double lambda = 0.0;
    double q = 2.0;
    bool sup = false;
};

/**
 * Per-order terms of the weighted norm, given precomputed derivatives {u, grad u, ...}.
 *
 * Term i is || rho^(-lambda + i - m/q) |grad^i u|_g ||_{L_q}, or for `sup` the grid
 * maximum of rho^(-lambda + i) |grad^i u|_g.
 */
std::vector<double> weighted_terms(const std::vector<TensorField>& derivs, const MetricField& g,
                                   const TensorField& rho, const WeightedNormSpec& spec);

/// Sum of weighted_terms for orders 0..spec.k.
double weighted_sobolev_norm(const TensorField& u, const Connection& conn, const TensorField& rho,
                             const WeightedNormSpec& spec);

/// Unweighted W_q^k (or BC^k) norm in the connection's own metric.
double sobolev_norm(const TensorField& u, const Connection& conn, int k, double q, bool sup = false);

/// P^lambda u = rho^lambda u.
TensorField weight_map(const TensorField& u, double lambda, const TensorField& rho);

/// Rejects rho outside (0, 1].
void require_weight(const TensorField& rho);

}  // namespace cuspfs::weighted
