#pragma once

#include <string>
#include <vector>

#include "cuspfs/parabolic/operator.hpp"

namespace cuspfs::parabolic {

enum class Scheme { implicit_euler, crank_nicolson };

Scheme parse_scheme(const std::string& name);
std::string scheme_name(Scheme s);

struct SolverOptions {
    double dt = 1e-3;
    Scheme scheme = Scheme::implicit_euler;
    double tolerance = 1e-10;
    int max_iterations = 2000;
};

/// Time levels t_0 = 0, ..., t_N = T with the regularized and the physical solution.
struct Trajectory {
    std::vector<double> times;
    std::vector<TensorField> u_hat;
    std::vector<TensorField> u;
    std::vector<double> step_norms;  ///< L2 norm of u_hat in the flat metric
    int max_iterations_used = 0;
    bool symmetric = false;  ///< conjugate gradients were used
};

/**
 * Time stepping of rho^2 du_hat/dt + A_hat u_hat = rho^(2 - lambda) f on the cylinder,
 * started from u_hat_0 = rho^(-lambda) u_0; u = rho^lambda u_hat.
 *
 * Throws DomainError for an invalid step size and NumericalError naming the step
 * when the linear solver does not converge.
 */
Trajectory solve_ivp(const DiffusionProblem& problem, const SolverOptions& options);

/// Sparse finite-difference matrix of A_hat, applied to a full nodal vector (Dirichlet nodes read as 0).
TensorField apply_discrete_operator(const CylinderOperator& op, const CylinderGeometry& geo,
                                    const TensorField& u);

struct MaximalRegularity {
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
};

/**
 * lhs = ||u||_{L_q(J, W^{2,lambda})} + ||du/dt||_{L_q(J, L^{lambda-2})},
 * rhs = ||f||_{L_q(J, L^{lambda-2})} + ||u_0||_{W^{2,lambda}}, with step-wise q-sums in time.
 * The ratio is 0 for zero data.
 */
MaximalRegularity maximal_regularity_functional(const Trajectory& traj, const DiffusionProblem& problem);

}  // namespace cuspfs::parabolic
