#pragma once

#include <string>
#include <vector>

#include "cuspfs/weighted/corpus.hpp"
#include "cuspfs/weighted/discretization.hpp"

namespace cuspfs::weighted {

/// min / max / median of a ratio sample and C = max(max, 1 / min).
struct Bracket {
    double min = 0.0;
    double max = 0.0;
    double median = 0.0;
    double C = 0.0;
};

Bracket bracket(std::vector<double> ratios);

/// |b - a| / |b|: relative change from a coarse to a fine measurement.
double drift(double coarse, double fine);

/// Observed order of a quantity that shrinks by the refinement factor 2.
double observed_order(double coarse, double fine);

// Every function below returns one value per corpus function, in corpus order.

/// Grid maximum over nodes of |hat-nabla w - nabla w - S.w| in the regularized metric, w = du.
std::vector<double> connection_residuals(const CuspDiscretization& d, const Corpus& corpus);

/// Grid maximum of |hat-nabla(delta u) - delta hat-nabla u - d delta (x) u|, delta = rho^lambda.
std::vector<double> product_rule_residuals(const CuspDiscretization& d, const Corpus& corpus, double lambda);

/// Forward then backward substitution against the directly computed nabla^k u, all k <= k_max.
std::vector<double> round_trip_residuals(const CuspDiscretization& d, const Corpus& corpus, int k_max);

/// Forward substitution against the directly computed hat-nabla^k u, all k <= k_max.
std::vector<double> forward_residuals(const CuspDiscretization& d, const Corpus& corpus, int k_max);

/// ||u||_{W_q^k(M; rho)} / ||u||_{W_q^k(M-hat)}.
std::vector<double> equivalence_ratios(const CuspDiscretization& d, const Corpus& corpus, int k, double q);

/// The same ratio for the trivial weight rho = 1, where M-hat = M.
std::vector<double> trivial_weight_ratios(const CuspDiscretization& d, const Corpus& corpus, int k, double q);

/// ||rho^lambda u||_{W_q^{k,lambda}(M; rho)} / ||u||_{W_q^k(M-hat)}.
std::vector<double> isomorphism_ratios(const CuspDiscretization& d, const Corpus& corpus, int k, double q,
                                       double lambda);

/// || sum_i |hat-nabla^i(delta u)| ||_q / || delta sum_i |hat-nabla^i u| ||_q on M-hat.
std::vector<double> commutator_ratios(const CuspDiscretization& d, const Corpus& corpus, int k, double q,
                                      double lambda);

/// Commutator families against direct derivatives of delta u, maximum over orders <= k.
std::vector<double> commutator_identity_residuals(const CuspDiscretization& d, const Corpus& corpus, int k,
                                                  double lambda);

/// Number of corpus functions with ||u||_{k,lambda0} > ||u||_{k,lambda1}; lambda0 <= lambda1.
int monotonicity_violations(const CuspDiscretization& d, const Corpus& corpus, int k, double q, double lambda0,
                            double lambda1);

/// Embedding inequalities on the regularized manifold.
struct EmbeddingSpec {
    enum class Variant { sobolev, morrey, gn };
    Variant variant = Variant::gn;
    int s0 = 0;
    double q0 = 2.0;
    int s1 = 1;
    double q1 = 2.0;
};

EmbeddingSpec::Variant parse_embedding_variant(const std::string& name);

/// Throws ConfigError when the index relation of the variant fails for dimension m.
void validate_embedding(const EmbeddingSpec& spec, int m);

/// LHS norm over the RHS expression, per function.
std::vector<double> embedding_ratios(const CuspDiscretization& d, const Corpus& corpus, const EmbeddingSpec& spec);

/// ||v u||_{W_q^{k, lambda0 + lambda1}} / (||v||_{BC^{k, lambda0}} ||u||_{W_q^{k, lambda1}}).
double multiplication_ratio(const CuspDiscretization& d, const geometry::TensorField& v,
                            const geometry::TensorField& u, int k, double q, double lambda0, double lambda1);

/**
 * ||v u||_{W_q^{k, lambda0 + lambda1}} / (||v||_{BC^{k, lambda0}} ||u||_{W_q^{k, lambda1}}) with the
 * multiplier v = rho^lambda0 (1 + 0.3 cos(s + id)).
 */
std::vector<double> multiplication_ratios(const CuspDiscretization& d, const Corpus& corpus, int k, double q,
                                          double lambda0, double lambda1);

}  // namespace cuspfs::weighted
