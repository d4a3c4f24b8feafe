#include "cuspfs/weighted/discretization.hpp"

#include "cuspfs/error.hpp"

namespace cuspfs::weighted {

MeshSpec MeshSpec::refined(int level) const {
    if (level < 0) throw DomainError("refinement level must be nonnegative");
    MeshSpec out = *this;
    const std::size_t f = std::size_t{1} << level;
    out.n_s = (n_s - 1) * f + 1;
    out.n_theta = n_theta * f;
    return out;
}

namespace {

cusp::CuspMesh make_mesh(const cusp::ModelCusp& Z, const MeshSpec& spec) {
    std::size_t n_theta = spec.n_theta;
    // Arc bases are not periodic: keep an endpoint node.
    if (Z.base().kind == cusp::CuspBase::Kind::arc) n_theta += 1;
    return spec.cylinder ? Z.cylinder_mesh(spec.s_len, spec.n_s, n_theta)
                         : Z.stretched_mesh(spec.s_len, spec.n_s, n_theta);
}

}  // namespace

CuspDiscretization::CuspDiscretization(const cusp::ModelCusp& Z, const MeshSpec& spec)
    : mesh_(make_mesh(Z, spec)),
      conn_(Z.metric(mesh_)),
      hat_conn_(geometry::conformal_rescale(conn_.metric(), Z.singularity_function(mesh_))),
      rho_(Z.singularity_function(mesh_)),
      dlog_rho_(Z.log_singularity_gradient(mesh_)) {}

}  // namespace cuspfs::weighted
