#pragma once

#include <numbers>
#include <vector>

#include "cuspfs/cusp/glue.hpp"
#include "cuspfs/weighted/checks.hpp"

namespace cuspfs::kondratiev {

using geometry::TensorField;

/// Sector 0 < r <= 1, 0 <= theta <= theta1 (punctured disk for theta1 = 2 pi) on a geometrically graded polar grid.
struct DomainSpec {
    double theta1 = 2.0 * std::numbers::pi;
    cusp::BlendSpec blend{0.25, 0.5};
    double s_len = 8.0;  ///< r ranges over [exp(-s_len), 1]
    std::size_t n_s = 161;
    std::size_t n_theta = 64;

    DomainSpec refined(int level) const;
};

/// Flat planar domain in polar coordinates with the blended distance function delta.
class ConicalDomain {
public:
    explicit ConicalDomain(const DomainSpec& spec);

    const DomainSpec& spec() const { return spec_; }
    const weighted::CuspDiscretization& discretization() const { return disc_; }
    const geometry::GridPtr& grid() const { return disc_.grid(); }
    const geometry::Connection& conn() const { return disc_.conn(); }
    /// delta = r below eps0, 1 above eps1.
    const TensorField& delta() const { return glued_.rho; }
    /// Singularity function of the glued manifold with the flat outer metric.
    const cusp::GluedManifold& glued() const { return glued_; }

private:
    DomainSpec spec_;
    cusp::ModelCusp cone_;
    weighted::CuspDiscretization disc_;
    cusp::GluedManifold glued_;
};

/// Cartesian partials d^alpha u for |alpha| = order (x; y or xx; xy; yy), from polar covariant derivatives.
std::vector<TensorField> cartesian_partials(const ConicalDomain& dom, const std::vector<TensorField>& derivs,
                                            int order);

/// sum over |alpha| <= k of || delta^(|alpha| - a) d^alpha u ||_{L_q}.
double kondratiev_norm(const ConicalDomain& dom, const TensorField& u, int k, double a, double q);

/// sum over j <= k of || delta^(-lambda + j - 2/q) |nabla^j u| ||_{L_q}.
double distance_norm(const ConicalDomain& dom, const TensorField& u, int k, double lambda, double q);

/// kondratiev_norm(k, a, q) / distance_norm(k, a - 2/q, q) per corpus function.
std::vector<double> kondratiev_ratios(const ConicalDomain& dom, const weighted::Corpus& corpus, int k, double a,
                                      double q);

/// Pointwise min / max over nodes of sum_{|alpha| = j} |d^alpha u| / |nabla^j u|.
std::pair<double, double> cartesian_covariant_bracket(const ConicalDomain& dom, const TensorField& u, int j);

struct EquivalenceReport {
    weighted::Bracket coarse;
    weighted::Bracket fine;
    weighted::Bracket alternate_blend;  ///< fine mesh, blend radii moved outward by 10%
    double refinement_drift = 0.0;      ///< drift of C
    double blend_drift = 0.0;
};

/// Brackets at two refinement levels and under the alternate blend.
EquivalenceReport kondratiev_equivalence_report(const DomainSpec& spec, const weighted::Corpus& corpus, int k,
                                                double a, double q);

}  // namespace cuspfs::kondratiev
