#pragma once

#include <memory>
#include <vector>

#include "cuspfs/cusp/characteristic.hpp"
#include "cuspfs/geometry/metric.hpp"

namespace cuspfs::cusp {

using geometry::GridPtr;
using geometry::MetricField;
using geometry::TensorField;

enum class CuspFlavor { cone, cusp };

/// Compact base B: a full circle, an arc, or a single point (m = 1).
struct CuspBase {
    enum class Kind { circle, arc, point };
    Kind kind = Kind::circle;
    double theta0 = 0.0;
    double theta1 = 0.0;

    static CuspBase circle();
    static CuspBase arc(double theta0, double theta1);
    static CuspBase point();
    int dim() const { return kind == Kind::point ? 0 : 1; }
};

/**
 * Grid on a model cusp.
 *
 * Axis 0 is either the stretched radial coordinate t or the arclength s; the
 * nodes are uniform in s in both cases. `t` and `s` list the axis-0 values.
 */
struct CuspMesh {
    GridPtr grid;
    std::vector<double> t;
    std::vector<double> s;
    bool cylinder = false;

    std::size_t radial_index(std::size_t node) const { return grid->unflatten(node)[0]; }
};

/**
 * Model cone or cusp Z over a base B with characteristic R.
 *
 * Stretched coordinates (t, theta) carry g_Z = dt^2 + R(t)^2 g_B; the singularity
 * function is r_Z = R(t). Cylinder coordinates (s, theta) use the arclength map.
 */
class ModelCusp {
public:
    ModelCusp(CuspCharacteristic R, CuspBase base, CuspFlavor flavor, double epsilon = 1.0);

    int dim() const { return 1 + base_.dim(); }
    const CuspCharacteristic& characteristic() const { return arclength_->characteristic(); }
    const ArclengthMap& arclength() const { return *arclength_; }
    const CuspBase& base() const { return base_; }
    CuspFlavor flavor() const { return flavor_; }
    double epsilon() const { return epsilon_; }

    /// (t, theta) grid with t_j = t(s_j), s uniform in [s(epsilon), s(epsilon) + s_len].
    CuspMesh stretched_mesh(double s_len, std::size_t n_s, std::size_t n_theta) const;
    /// (s, theta) grid over the same arclength range.
    CuspMesh cylinder_mesh(double s_len, std::size_t n_s, std::size_t n_theta) const;

    /// g_Z on the mesh's coordinates.
    MetricField metric(const CuspMesh& mesh) const;
    /// Metric induced by the standard embedding into Euclidean space.
    MetricField embedding_metric(const CuspMesh& mesh) const;
    /// r_Z = R(t).
    TensorField singularity_function(const CuspMesh& mesh) const;
    /// d log r_Z, evaluated analytically.
    TensorField log_singularity_gradient(const CuspMesh& mesh) const;

private:
    CuspBase base_;
    CuspFlavor flavor_;
    double epsilon_;
    std::shared_ptr<const ArclengthMap> arclength_;

    geometry::Axis base_axis(std::size_t n_theta) const;
};

/// Grid maximum of r_Z^(k+1) |nabla^k d log r_Z| on the stretched mesh.
double singularity_bound(const ModelCusp& Z, const CuspMesh& mesh, int k);

}  // namespace cuspfs::cusp
