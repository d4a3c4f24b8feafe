#pragma once

#include <functional>
#include <span>

#include "cuspfs/cusp/model_cusp.hpp"

namespace cuspfs::cusp {

/// C^3 step: 0 for x <= 0, 1 for x >= 1, degree-7 polynomial in between.
double smooth_step(double x);
/// Derivative of smooth_step of the given order (0..3).
double smooth_step_derivative(double x, int order);

struct BlendSpec {
    double eps0 = 0.25;
    double eps1 = 0.5;
};

/// Blended singularity data on a stretched cusp mesh.
struct GluedManifold {
    CuspMesh mesh;
    TensorField rho;       ///< (1 - w) r_Z + w
    TensorField dlog_rho;  ///< analytic d log rho
    MetricField gbar;      ///< (1 - w) g_Z + w g_outer
    MetricField ghat;      ///< gbar / rho^2
};

/// Outer metric evaluator: coordinates (t, theta) to g_ij row-major.
using MetricFunction = std::function<void(const geometry::Point&, std::span<double>)>;

/// Glue the model cusp to an outer metric through the cutoff w(t) = step((t - eps0)/(eps1 - eps0)).
GluedManifold glue_cusp(const ModelCusp& Z, const CuspMesh& mesh, BlendSpec blend,
                        const MetricFunction& outer_metric);

}  // namespace cuspfs::cusp
