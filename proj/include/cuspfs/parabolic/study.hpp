#pragma once

#include <vector>

#include "cuspfs/parabolic/solver.hpp"

namespace cuspfs::parabolic {

/// Manufactured solution u* = exp(-t) rho^lambda sin(s) chi(s), chi = (1 - (s/L)^2)^6 on s < L = s_max / 2.
struct MmsSpec {
    double lambda = 0.0;
    double q = 2.0;
    double T = 0.5;
    double s_max = 6.0;
    std::size_t n_s = 61;
    std::size_t n_theta = 8;
};

/// sin(s) chi(s) and its first two s-derivatives.
std::array<double, 3> mms_profile(double s, double s_max);

/// Problem with identity diffusion whose source makes u* an exact solution.
DiffusionProblem manufactured_problem(const cusp::ModelCusp& Z, const MmsSpec& spec);

/// Exact u_hat* = exp(-t) sin(s) chi(s) on the problem's grid.
TensorField manufactured_u_hat(const CylinderGeometry& geo, double s_max, double t);

/// sqrt(sum_n dt int |u_hat^n - u_hat*(t_n)|^2) in the flat metric.
double mms_error(const Trajectory& traj, const CylinderGeometry& geo, double s_max);

/**
 * Discrete L2(J, L2) distance between two trajectories whose time levels and nodes
 * nest (the finer one refines either in time or in space by an integer factor).
 */
double trajectory_distance(const Trajectory& coarse, const Trajectory& fine);

struct OrderStudy {
    std::vector<double> dt;
    std::vector<std::size_t> n_s;
    std::vector<double> exact_error;
    std::vector<double> differences;  ///< successive distances
    double observed_order = 0.0;      ///< log2 of the ratio of successive differences
    double exact_order = 0.0;         ///< from the last two exact errors
};

/// Richardson triple in time at fixed spatial resolution: dt, dt/2, dt/4.
OrderStudy time_order_study(const cusp::ModelCusp& Z, const MmsSpec& spec, double dt, Scheme scheme);
/// Richardson triple in space at fixed dt: n_s, 2 n_s - 1, 4 n_s - 3 (n_theta doubled likewise).
OrderStudy space_order_study(const cusp::ModelCusp& Z, const MmsSpec& spec, double dt, Scheme scheme);

struct HeatModeResult {
    double measured = 0.0;  ///< ||u(T)|| / ||u(0)||
    double exact = 0.0;     ///< exp(-T)
    double relative_error = 0.0;
};

/// u_0 = sin(theta) on a flat periodic square of side 2 pi.
HeatModeResult heat_mode_decay(double T, double dt, std::size_t n, Scheme scheme);

struct MrRun {
    double alpha = 1.0;
    double lambda = 0.0;
    double q = 2.0;
    double dt = 0.0;
    std::size_t n_s = 0;
    MaximalRegularity value;
};

struct MrStudy {
    std::vector<MrRun> runs;
    /// Per (alpha, lambda, q) triple: max relative deviation of the ratio from its coarsest run.
    std::vector<double> drift;
    double max_ratio = 0.0;
    double max_drift = 0.0;
};

/**
 * Maximal-regularity functional for the manufactured data over power cusps, weights
 * and exponents, each at {dt, dt/2} x {n_s, 2 n_s - 1}.
 */
MrStudy mr_study(const std::vector<double>& alphas, const std::vector<double>& lambdas,
                 const std::vector<double>& qs, const MmsSpec& base, double dt, Scheme scheme);

}  // namespace cuspfs::parabolic
