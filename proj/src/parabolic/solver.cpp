#include "cuspfs/parabolic/solver.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCore>
#include <cmath>
#include <string>

#include "cuspfs/error.hpp"
#include "cuspfs/weighted/norms.hpp"

namespace cuspfs::parabolic {

namespace geo = geometry;

Scheme parse_scheme(const std::string& name) {
    if (name == "implicit-euler") return Scheme::implicit_euler;
    if (name == "crank-nicolson") return Scheme::crank_nicolson;
    throw ConfigError("unknown time scheme '" + name + "'");
}

std::string scheme_name(Scheme s) { return s == Scheme::implicit_euler ? "implicit-euler" : "crank-nicolson"; }

namespace {

using SpMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Vec = Eigen::VectorXd;
constexpr std::ptrdiff_t kFixed = -1;

double uniform_spacing(const geo::Axis& ax) {
    const auto& c = ax.coords;
    const double h = ax.periodic ? ax.period / static_cast<double>(c.size())
                                 : (c.back() - c.front()) / static_cast<double>(c.size() - 1);
    for (std::size_t i = 1; i < c.size(); ++i)
        if (std::abs(c[i] - c[i - 1] - h) > 1e-9 * h) throw DomainError("solver grid must be uniform");
    return h;
}

/// Node numbering with Dirichlet nodes removed, and the discrete operator on the unknowns.
class Discretization {
public:
    Discretization(const CylinderOperator& op, const CylinderGeometry& geo) : geo_(geo) {
        const auto& grid = *geo.grid;
        const int m = grid.dim();
        for (int a = 0; a < m; ++a) {
            h_[a] = uniform_spacing(grid.axis(a));
            n_[a] = grid.extent(a);
            const bool periodic = grid.axis(a).periodic;
            for (int side = 0; side < 2; ++side)
                if ((geo.bc[a][side] == Boundary::periodic) != periodic)
                    throw DomainError("periodic boundary conditions must match periodic axes");
        }
        index_.assign(grid.size(), kFixed);
        for (std::size_t node = 0; node < grid.size(); ++node) {
            if (is_dirichlet(node)) continue;
            index_[node] = static_cast<std::ptrdiff_t>(unknowns_.size());
            unknowns_.push_back(node);
        }
        assemble(op);
    }

    std::size_t size() const { return unknowns_.size(); }
    const SpMat& matrix() const { return K_; }
    const std::vector<std::size_t>& unknowns() const { return unknowns_; }

    Vec gather(const TensorField& u) const {
        Vec v(static_cast<Eigen::Index>(size()));
        for (std::size_t k = 0; k < size(); ++k) v[static_cast<Eigen::Index>(k)] = u.value(unknowns_[k]);
        return v;
    }
    TensorField scatter(const Vec& v) const {
        TensorField u(geo_.grid, {0, 0});
        for (std::size_t k = 0; k < size(); ++k) u(unknowns_[k], 0) = v[static_cast<Eigen::Index>(k)];
        return u;
    }

private:
    const CylinderGeometry& geo_;
    std::array<double, 2> h_{};
    std::array<std::size_t, 2> n_{};
    std::vector<std::ptrdiff_t> index_;
    std::vector<std::size_t> unknowns_;
    SpMat K_;

    bool is_dirichlet(std::size_t node) const {
        const auto ij = geo_.grid->unflatten(node);
        for (int a = 0; a < geo_.dim(); ++a) {
            if (ij[a] == 0 && geo_.bc[a][0] == Boundary::dirichlet) return true;
            if (ij[a] + 1 == n_[a] && geo_.bc[a][1] == Boundary::dirichlet) return true;
        }
        return false;
    }

    /// Grid index of the neighbour at offset dir (+-1) along axis a; ghosts mirror across Neumann ends.
    std::size_t neighbour(std::size_t i, int a, int dir) const {
        const auto n = static_cast<std::ptrdiff_t>(n_[a]);
        std::ptrdiff_t j = static_cast<std::ptrdiff_t>(i) + dir;
        if (j < 0 || j >= n) {
            const int side = j < 0 ? 0 : 1;
            j = geo_.bc[a][side] == Boundary::periodic ? (j + n) % n : static_cast<std::ptrdiff_t>(i) - dir;
        }
        return static_cast<std::size_t>(j);
    }

    std::size_t node_at(std::array<std::size_t, 2> ij) const { return geo_.grid->node(ij[0], ij[1]); }

    void assemble(const CylinderOperator& op) {
        const int m = geo_.dim();
        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(size() * 9);
        for (std::size_t row = 0; row < size(); ++row) {
            const std::size_t node = unknowns_[row];
            const auto ij = geo_.grid->unflatten(node);
            auto add = [&](std::array<std::size_t, 2> at, double w) {
                const std::ptrdiff_t col = index_[node_at(at)];
                if (col != kFixed) trip.emplace_back(static_cast<int>(row), static_cast<int>(col), -w);
            };
            add(ij, op.a0.value(node));
            for (int a = 0; a < m; ++a) {
                auto lo = ij, hi = ij;
                lo[a] = neighbour(ij[a], a, -1);
                hi[a] = neighbour(ij[a], a, +1);
                const double c2 = op.a2(node, static_cast<std::size_t>(a * m + a)) / (h_[a] * h_[a]);
                const double c1 = op.a1(node, static_cast<std::size_t>(a)) / (2.0 * h_[a]);
                add(lo, c2 - c1);
                add(hi, c2 + c1);
                add(ij, -2.0 * c2);
            }
            if (m == 2) {
                const double c = (op.a2(node, 1) + op.a2(node, 2)) / (4.0 * h_[0] * h_[1]);
                for (int d0 : {-1, 1})
                    for (int d1 : {-1, 1})
                        add({neighbour(ij[0], 0, d0), neighbour(ij[1], 1, d1)}, c * d0 * d1);
            }
        }
        K_.resize(static_cast<Eigen::Index>(size()), static_cast<Eigen::Index>(size()));
        K_.setFromTriplets(trip.begin(), trip.end());
        K_.makeCompressed();
    }
};

bool is_symmetric(const SpMat& A) {
    const SpMat At = A.transpose();
    return (A - At).norm() <= 1e-13 * A.norm();
}

}  // namespace

TensorField apply_discrete_operator(const CylinderOperator& op, const CylinderGeometry& geo,
                                    const TensorField& u) {
    const Discretization disc(op, geo);
    return disc.scatter(disc.matrix() * disc.gather(u));
}

Trajectory solve_ivp(const DiffusionProblem& problem, const SolverOptions& options) {
    const double dt = options.dt;
    if (!(dt > 0) || dt > problem.T) throw DomainError("time step must satisfy 0 < dt <= T");
    const double steps_real = problem.T / dt;
    const auto steps = static_cast<std::size_t>(std::llround(steps_real));
    if (std::abs(steps_real - static_cast<double>(steps)) > 1e-9 * steps_real)
        throw DomainError("T must be an integer multiple of dt");
    const CylinderGeometry& geo = problem.geo;
    const double lambda = problem.lambda;
    const CylinderOperator op = desingularize_operator(problem);
    const Discretization disc(op, geo);
    const std::size_t n = disc.size();

    Vec mass(static_cast<Eigen::Index>(n)), fweight(static_cast<Eigen::Index>(n));
    for (std::size_t k = 0; k < n; ++k) {
        const double r = geo.rho.value(disc.unknowns()[k]);
        mass[static_cast<Eigen::Index>(k)] = r * r;
        fweight[static_cast<Eigen::Index>(k)] = std::pow(r, 2.0 - lambda);
    }
    const double theta = options.scheme == Scheme::implicit_euler ? 1.0 : 0.5;
    SpMat lhs = theta * dt * disc.matrix();
    SpMat explicit_part = -(1.0 - theta) * dt * disc.matrix();
    for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(n); ++k) {
        lhs.coeffRef(k, k) += mass[k];
        explicit_part.coeffRef(k, k) += mass[k];
    }
    lhs.makeCompressed();

    Trajectory traj;
    traj.symmetric = is_symmetric(lhs);
    Eigen::ConjugateGradient<SpMat, Eigen::Lower | Eigen::Upper, Eigen::IncompleteCholesky<double>> cg;
    Eigen::BiCGSTAB<SpMat, Eigen::IncompleteLUT<double>> bicg;
    if (traj.symmetric) {
        cg.setTolerance(options.tolerance);
        cg.setMaxIterations(options.max_iterations);
        cg.compute(lhs);
        if (cg.info() != Eigen::Success) throw NumericalError("preconditioner setup failed");
    } else {
        bicg.setTolerance(options.tolerance);
        bicg.setMaxIterations(options.max_iterations);
        bicg.compute(lhs);
        if (bicg.info() != Eigen::Success) throw NumericalError("preconditioner setup failed");
    }

    auto source = [&](double t) -> Vec {
        if (!problem.source) return Vec::Zero(static_cast<Eigen::Index>(n));
        return fweight.cwiseProduct(disc.gather(problem.source(t)));
    };
    auto record = [&](double t, const Vec& v) {
        TensorField uh = disc.scatter(v);
        traj.times.push_back(t);
        traj.step_norms.push_back(geo::lq_norm(uh, geo.hat_conn.metric(), 2.0));
        traj.u.push_back(weighted::weight_map(uh, lambda, geo.rho));
        traj.u_hat.push_back(std::move(uh));
    };

    Vec v = disc.gather(weighted::weight_map(problem.u0, -lambda, geo.rho));
    record(0.0, v);
    Vec f_old = theta < 1.0 ? source(0.0) : Vec();
    for (std::size_t step = 1; step <= steps; ++step) {
        const double t = problem.T * static_cast<double>(step) / static_cast<double>(steps);
        Vec f_new = source(t);
        Vec rhs = explicit_part * v + dt * theta * f_new;
        if (theta < 1.0) rhs += dt * (1.0 - theta) * f_old;
        Vec next;
        int iters;
        bool ok;
        if (traj.symmetric) {
            next = cg.solveWithGuess(rhs, v);
            iters = static_cast<int>(cg.iterations());
            ok = cg.info() == Eigen::Success;
        } else {
            next = bicg.solveWithGuess(rhs, v);
            iters = static_cast<int>(bicg.iterations());
            ok = bicg.info() == Eigen::Success;
        }
        if (!ok || !next.allFinite())
            throw NumericalError("linear solve did not converge at step " + std::to_string(step) + " (t = " +
                                 std::to_string(t) + ")");
        traj.max_iterations_used = std::max(traj.max_iterations_used, iters);
        v = std::move(next);
        f_old = std::move(f_new);
        record(t, v);
    }
    return traj;
}

MaximalRegularity maximal_regularity_functional(const Trajectory& traj, const DiffusionProblem& problem) {
    const auto& geo = problem.geo;
    const double q = problem.q, lambda = problem.lambda;
    const weighted::WeightedNormSpec w2{2, lambda, q};
    const weighted::WeightedNormSpec l0{0, lambda - 2.0, q};
    double su = 0.0, sdu = 0.0, sf = 0.0;
    for (std::size_t n = 1; n < traj.times.size(); ++n) {
        const double dt = traj.times[n] - traj.times[n - 1];
        su += dt * std::pow(weighted::weighted_sobolev_norm(traj.u[n], geo.conn, geo.rho, w2), q);
        TensorField du = traj.u[n] - traj.u[n - 1];
        du *= 1.0 / dt;
        sdu += dt * std::pow(weighted::weighted_sobolev_norm(du, geo.conn, geo.rho, l0), q);
        if (problem.source)
            sf += dt * std::pow(weighted::weighted_sobolev_norm(problem.source(traj.times[n]), geo.conn, geo.rho, l0), q);
    }
    MaximalRegularity out;
    out.lhs = std::pow(su, 1.0 / q) + std::pow(sdu, 1.0 / q);
    out.rhs = std::pow(sf, 1.0 / q) + weighted::weighted_sobolev_norm(problem.u0, geo.conn, geo.rho, w2);
    out.ratio = out.rhs > 0 ? out.lhs / out.rhs : 0.0;
    return out;
}

}  // namespace cuspfs::parabolic
