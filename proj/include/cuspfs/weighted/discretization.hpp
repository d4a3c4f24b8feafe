#pragma once

#include "cuspfs/cusp/model_cusp.hpp"
#include "cuspfs/geometry/calculus.hpp"

namespace cuspfs::weighted {

/// Resolution of a cusp mesh; `level` doubles the number of intervals per axis.
struct MeshSpec {
    double s_len = 6.0;
    std::size_t n_s = 121;
    std::size_t n_theta = 32;
    bool cylinder = true;

    MeshSpec refined(int level) const;
};

/// Everything needed to compare the singular and regularized geometry on one mesh.
class CuspDiscretization {
public:
    CuspDiscretization(const cusp::ModelCusp& Z, const MeshSpec& spec);

    const cusp::CuspMesh& mesh() const { return mesh_; }
    const geometry::GridPtr& grid() const { return mesh_.grid; }
    int dim() const { return mesh_.grid->dim(); }
    const geometry::Connection& conn() const { return conn_; }
    const geometry::Connection& hat_conn() const { return hat_conn_; }
    const geometry::MetricField& g() const { return conn_.metric(); }
    const geometry::MetricField& ghat() const { return hat_conn_.metric(); }
    const geometry::TensorField& rho() const { return rho_; }
    /// Analytic d log rho.
    const geometry::TensorField& dlog_rho() const { return dlog_rho_; }
    /// Arclength coordinate of a node.
    double s(std::size_t node) const { return mesh_.s[mesh_.radial_index(node)]; }

private:
    cusp::CuspMesh mesh_;
    geometry::Connection conn_;
    geometry::Connection hat_conn_;
    geometry::TensorField rho_;
    geometry::TensorField dlog_rho_;
};

}  // namespace cuspfs::weighted
