#pragma once

#include <array>
#include <functional>

#include "cuspfs/cusp/model_cusp.hpp"
#include "cuspfs/geometry/calculus.hpp"

namespace cuspfs::parabolic {

using geometry::Connection;
using geometry::GridPtr;
using geometry::MetricField;
using geometry::TensorField;

enum class Boundary { dirichlet, neumann, periodic };

/**
 * Uniform coordinate grid on which the regularized metric is the flat one.
 *
 * The singular metric is g = rho^2 ghat. `bc[axis][side]` gives the boundary
 * condition at the low (side 0) and high (side 1) end of each axis.
 */
struct CylinderGeometry {
    GridPtr grid;
    TensorField rho;
    TensorField dlog_rho;
    Connection conn;
    Connection hat_conn;
    std::array<std::array<Boundary, 2>, 2> bc{};

    int dim() const { return grid->dim(); }

    /// Truncated cylinder [0, s_max] x B of a model cusp: Dirichlet at s = 0, Neumann at s_max.
    static CylinderGeometry from_cusp(const cusp::ModelCusp& Z, double s_max, std::size_t n_s,
                                      std::size_t n_theta);
    /// Flat periodic square of side `length` with rho = 1.
    static CylinderGeometry flat_torus(double length, std::size_t n0, std::size_t n1);
};

/// Reaction-free diffusion problem du/dt - div(a grad u) = f on J = [0, T].
struct DiffusionProblem {
    CylinderGeometry geo;
    TensorField a;         ///< (1,1) diffusion tensor
    double epsilon = 0.0;  ///< claimed ellipticity bound
    double lambda = 0.0;
    double q = 2.0;
    double T = 1.0;
    std::function<TensorField(double)> source;  ///< f(t) on the singular side
    TensorField u0;
};

TensorField identity_diffusion(const GridPtr& grid);
/// Symmetric, angle dependent perturbation of the identity; eigenvalues lie in [1, 1 + strength].
TensorField anisotropic_diffusion(const GridPtr& grid, double strength);

/// a^i_j g^jk as a (2,0) field.
TensorField raise_diffusion(const TensorField& a, const MetricField& g);

struct EllipticityReport {
    double bound = 0.0;      ///< smallest eigenvalue over all nodes
    std::size_t node = 0;    ///< node attaining it
};

/// Smallest eigenvalue of the symmetric part of a (2,0) field relative to g*.
EllipticityReport principal_ellipticity(const TensorField& a2, const MetricField& g);
/// Same for a (1,1) diffusion tensor, after raising with g.
EllipticityReport ellipticity(const TensorField& a, const MetricField& g);

/// Coefficients of the regularized operator -(a2 . hat-nabla^2 + a1 . hat-nabla + a0).
struct CylinderOperator {
    TensorField a2;  ///< (2,0)
    TensorField a1;  ///< (1,0)
    TensorField a0;  ///< scalar
};

/**
 * Conjugate -div(a grad .) by the weight maps: rho^(2 - lambda) A (rho^lambda u).
 * Throws DomainError naming the worst node when a is not epsilon-elliptic.
 */
CylinderOperator desingularize_operator(const DiffusionProblem& problem);
CylinderOperator desingularize_operator(const CylinderGeometry& geo, const TensorField& a, double lambda);

/// Apply the coefficient form of the regularized operator with the flat connection.
TensorField apply_cylinder_operator(const CylinderOperator& op, const CylinderGeometry& geo,
                                    const TensorField& u);

/// -div_g(a grad_g u) with the singular metric.
TensorField apply_singular_operator(const Connection& conn, const TensorField& a, const TensorField& u);

}  // namespace cuspfs::parabolic
