#include "cuspfs/parabolic/operator.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "cuspfs/error.hpp"

namespace cuspfs::parabolic {

namespace geo = geometry;

CylinderGeometry CylinderGeometry::from_cusp(const cusp::ModelCusp& Z, double s_max, std::size_t n_s,
                                             std::size_t n_theta) {
    if (Z.base().kind == cusp::CuspBase::Kind::arc) n_theta += 1;
    const auto mesh = Z.cylinder_mesh(s_max, n_s, n_theta);
    CylinderGeometry out{mesh.grid,
                         Z.singularity_function(mesh),
                         Z.log_singularity_gradient(mesh),
                         Connection(Z.metric(mesh)),
                         Connection(geo::flat_metric(mesh.grid)),
                         {}};
    out.bc[0] = {Boundary::dirichlet, Boundary::neumann};
    if (out.dim() == 2)
        out.bc[1] = mesh.grid->axis(1).periodic ? std::array{Boundary::periodic, Boundary::periodic}
                                                : std::array{Boundary::neumann, Boundary::neumann};
    return out;
}

CylinderGeometry CylinderGeometry::flat_torus(double length, std::size_t n0, std::size_t n1) {
    auto grid = geo::make_grid({geo::Axis::periodic_uniform(0.0, length, n0),
                                geo::Axis::periodic_uniform(0.0, length, n1)});
    auto flat = geo::flat_metric(grid);
    CylinderGeometry out{grid, TensorField::constant_scalar(grid, 1.0), TensorField(grid, {0, 1}),
                         Connection(flat), Connection(flat), {}};
    out.bc[0] = {Boundary::periodic, Boundary::periodic};
    out.bc[1] = {Boundary::periodic, Boundary::periodic};
    return out;
}

TensorField identity_diffusion(const GridPtr& grid) { return geo::identity_tensor(grid); }

TensorField anisotropic_diffusion(const GridPtr& grid, double strength) {
    if (!(strength >= 0)) throw DomainError("anisotropy strength must be nonnegative");
    if (grid->dim() == 1)
        return TensorField::from_function(grid, {1, 1}, [strength](const geo::Point& p, std::span<double> c) {
            c[0] = 1.0 + 0.5 * strength * (1.0 + std::sin(p[0]));
        });
    return TensorField::from_function(grid, {1, 1}, [strength](const geo::Point& p, std::span<double> c) {
        // Rotation by theta of diag(1 + strength, 1).
        const double cs = std::cos(p[1]), sn = std::sin(p[1]);
        c[0] = 1.0 + strength * cs * cs;
        c[1] = strength * cs * sn;
        c[2] = c[1];
        c[3] = 1.0 + strength * sn * sn;
    });
}

TensorField raise_diffusion(const TensorField& a, const MetricField& g) {
    if (!(a.valence() == geo::Valence{1, 1})) throw ValenceError("diffusion tensor must be a (1,1) field");
    return geo::contract(geo::tensor_product(a, g.inverse()), 2, 1);
}

EllipticityReport principal_ellipticity(const TensorField& a2, const MetricField& g) {
    if (!(a2.valence() == geo::Valence{2, 0})) throw ValenceError("principal part must be a (2,0) field");
    geo::require_same_grid(a2, g.covariant(), "principal_ellipticity");
    const int m = a2.dim();
    EllipticityReport out{std::numeric_limits<double>::infinity(), 0};
    for (std::size_t n = 0; n < a2.nodes(); ++n) {
        auto b = a2.at(n);
        auto gc = g.covariant().at(n);
        double lo;
        if (m == 1) {
            lo = gc[0] * b[0];
        } else {
            const double s01 = 0.5 * (b[1] + b[2]);
            // Eigenvalues of g_ij sym(b)^jk.
            const double p00 = gc[0] * b[0] + gc[1] * s01;
            const double p01 = gc[0] * s01 + gc[1] * b[3];
            const double p10 = gc[2] * b[0] + gc[3] * s01;
            const double p11 = gc[2] * s01 + gc[3] * b[3];
            const double half_gap = 0.5 * (p00 - p11);
            lo = 0.5 * (p00 + p11) - std::sqrt(std::max(0.0, half_gap * half_gap + p01 * p10));
        }
        if (lo < out.bound) out = {lo, n};
    }
    return out;
}

EllipticityReport ellipticity(const TensorField& a, const MetricField& g) {
    return principal_ellipticity(raise_diffusion(a, g), g);
}

CylinderOperator desingularize_operator(const CylinderGeometry& geo, const TensorField& a, double lambda) {
    geo::require_same_grid(a, geo.rho, "desingularize_operator");
    const MetricField& ghat = geo.hat_conn.metric();
    const int m = geo.dim();
    const TensorField& L = geo.dlog_rho;
    CylinderOperator op;
    op.a2 = raise_diffusion(a, ghat);
    const TensorField div_a = geo::contract(geo.hat_conn.derivative(op.a2), 1, 1);
    const TensorField aL = geo::contract(geo::tensor_product(op.a2, L), 1, 1);  // a^ik L_i
    const TensorField aLt = geo::complete_contraction(op.a2, L);             // a^ki L_i
    const TensorField LaL = geo::complete_contraction(aL, L);
    const TensorField hess_L = geo::complete_contraction(op.a2, geo.hat_conn.derivative(L));
    op.a1 = div_a + static_cast<double>(m - 2) * aL + lambda * (aL + aLt);
    op.a0 = lambda * (geo::complete_contraction(div_a, L) + static_cast<double>(m - 2) * LaL + hess_L) +
            lambda * lambda * LaL;
    return op;
}

CylinderOperator desingularize_operator(const DiffusionProblem& problem) {
    if (!(problem.epsilon > 0)) throw DomainError("ellipticity constant must be positive");
    const auto e = ellipticity(problem.a, problem.geo.conn.metric());
    if (e.bound < problem.epsilon)
        throw DomainError("diffusion tensor is not elliptic: eigenvalue " + std::to_string(e.bound) +
                          " below " + std::to_string(problem.epsilon) + " at node " + std::to_string(e.node));
    return desingularize_operator(problem.geo, problem.a, problem.lambda);
}

TensorField apply_cylinder_operator(const CylinderOperator& op, const CylinderGeometry& geo,
                                    const TensorField& u) {
    const auto d = geo.hat_conn.iterated(u, 2);
    TensorField out = geo::complete_contraction(op.a2, d[2]);
    out += geo::complete_contraction(op.a1, d[1]);
    out += u.scaled_by(op.a0);
    out *= -1.0;
    return out;
}

TensorField apply_singular_operator(const Connection& conn, const TensorField& a, const TensorField& u) {
    geo::require_scalar(u, "apply_singular_operator");
    // X^i = a^i_j g^jk d_k u, then -div X.
    const TensorField X = geo::complete_contraction(raise_diffusion(a, conn.metric()), conn.derivative(u));
    TensorField out = geo::contract(conn.derivative(X), 1, 1);
    out *= -1.0;
    return out;
}

}  // namespace cuspfs::parabolic
