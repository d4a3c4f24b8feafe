#include "cuspfs/parabolic/study.hpp"

#include <cmath>
#include <numbers>

#include "cuspfs/error.hpp"
#include "cuspfs/parallel.hpp"

namespace cuspfs::parabolic {

namespace geo = geometry;

std::array<double, 3> mms_profile(double s, double s_max) {
    const double L = 0.5 * s_max;
    if (s >= L) return {0.0, 0.0, 0.0};
    const double w = 1.0 - (s / L) * (s / L);
    const double dw = -2.0 * s / (L * L), ddw = -2.0 / (L * L);
    const double w4 = w * w * w * w;
    const double chi = w4 * w * w, dchi = 6.0 * w4 * w * dw, ddchi = 30.0 * w4 * dw * dw + 6.0 * w4 * w * ddw;
    const double sn = std::sin(s), cs = std::cos(s);
    return {sn * chi, cs * chi + sn * dchi, -sn * chi + 2.0 * cs * dchi + sn * ddchi};
}

DiffusionProblem manufactured_problem(const cusp::ModelCusp& Z, const MmsSpec& spec) {
    CylinderGeometry geo = CylinderGeometry::from_cusp(Z, spec.s_max, spec.n_s, spec.n_theta);
    const auto& R = Z.characteristic();
    const double lambda = spec.lambda;
    const double m = Z.dim();
    TensorField F(geo.grid, {0, 0});
    TensorField u0(geo.grid, {0, 0});
    for (std::size_t n = 0; n < F.nodes(); ++n) {
        const double s = geo.grid->point(n)[0];
        const double t = s == 0.0 ? Z.epsilon() : Z.arclength().inverse(s);
        const double r = R.value(t);
        // L = d/ds log R(t(s)) with dt/ds = -R.
        const double L = -R.derivative(t, 1), dL = r * R.derivative(t, 2);
        const auto [phi, dphi, ddphi] = mms_profile(s, spec.s_max);
        const double rl = std::pow(r, lambda);
        const double dv = rl * (dphi + lambda * L * phi);
        const double ddv = rl * (ddphi + 2.0 * lambda * L * dphi + (lambda * dL + lambda * lambda * L * L) * phi);
        // du/dt - Delta_g u with Delta_g v = rho^-2 (v'' + (m - 2) L v').
        F(n, 0) = -rl * phi - (ddv + (m - 2.0) * L * dv) / (r * r);
        u0(n, 0) = rl * phi;
    }
    DiffusionProblem p{std::move(geo), TensorField{}, 0.5, lambda, spec.q, spec.T, {}, std::move(u0)};
    p.a = identity_diffusion(p.geo.grid);
    p.source = [F = std::move(F)](double t) {
        TensorField f = F;
        f *= std::exp(-t);
        return f;
    };
    return p;
}

TensorField manufactured_u_hat(const CylinderGeometry& geo, double s_max, double t) {
    TensorField u(geo.grid, {0, 0});
    const double e = std::exp(-t);
    for (std::size_t n = 0; n < u.nodes(); ++n) u(n, 0) = e * mms_profile(geo.grid->point(n)[0], s_max)[0];
    return u;
}

double mms_error(const Trajectory& traj, const CylinderGeometry& geo, double s_max) {
    double acc = 0.0;
    for (std::size_t n = 1; n < traj.times.size(); ++n) {
        const double dt = traj.times[n] - traj.times[n - 1];
        const auto diff = traj.u_hat[n] - manufactured_u_hat(geo, s_max, traj.times[n]);
        acc += dt * geo::integrate(diff, geo.hat_conn.metric(), 2.0);
    }
    return std::sqrt(acc);
}

namespace {

std::size_t nest_factor(const geo::Axis& coarse, const geo::Axis& fine) {
    const std::size_t nc = coarse.coords.size(), nf = fine.coords.size();
    const std::size_t ic = coarse.periodic ? nc : nc - 1, jf = coarse.periodic ? nf : nf - 1;
    if (coarse.periodic != fine.periodic || jf % ic != 0) throw DomainError("trajectories are not nested");
    return jf / ic;
}

}  // namespace

double trajectory_distance(const Trajectory& coarse, const Trajectory& fine) {
    if (coarse.times.size() < 2 || fine.times.size() < 2) throw DomainError("empty trajectory");
    const std::size_t nc = coarse.times.size() - 1, nf = fine.times.size() - 1;
    if (nf % nc != 0) throw DomainError("time levels are not nested");
    const std::size_t kt = nf / nc;
    const auto& gc = *coarse.u_hat[0].grid();
    const auto& gf = *fine.u_hat[0].grid();
    if (gc.dim() != gf.dim()) throw DomainError("trajectories are not nested");
    std::array<std::size_t, 2> k{1, 1};
    for (int a = 0; a < gc.dim(); ++a) k[a] = nest_factor(gc.axis(a), gf.axis(a));
    double acc = 0.0;
    for (std::size_t n = 1; n <= nc; ++n) {
        const double dt = coarse.times[n] - coarse.times[n - 1];
        const auto& uc = coarse.u_hat[n];
        const auto& uf = fine.u_hat[n * kt];
        double sum = 0.0;
        for (std::size_t node = 0; node < gc.size(); ++node) {
            const auto ij = gc.unflatten(node);
            const double d = uc.value(node) - uf.value(gf.node(ij[0] * k[0], ij[1] * k[1]));
            sum += d * d * gc.cell_weight(node);
        }
        acc += dt * sum;
    }
    return std::sqrt(acc);
}

namespace {

OrderStudy order_study(const cusp::ModelCusp& Z, const MmsSpec& spec, double dt, Scheme scheme, bool in_time) {
    OrderStudy out;
    std::vector<Trajectory> trajs;
    for (int level = 0; level < 3; ++level) {
        MmsSpec s = spec;
        double step = dt;
        if (in_time) {
            step = dt / static_cast<double>(1 << level);
        } else {
            s.n_s = (spec.n_s - 1) * (std::size_t{1} << level) + 1;
            s.n_theta = spec.n_theta << level;
        }
        const auto problem = manufactured_problem(Z, s);
        trajs.push_back(solve_ivp(problem, {step, scheme}));
        out.dt.push_back(step);
        out.n_s.push_back(s.n_s);
        out.exact_error.push_back(mms_error(trajs.back(), problem.geo, s.s_max));
        if (level > 0) out.differences.push_back(trajectory_distance(trajs[level - 1], trajs[level]));
        // Keep memory bounded: the coarsest level is no longer needed once compared.
        if (level == 2) trajs.clear();
    }
    out.observed_order = std::log2(out.differences[0] / out.differences[1]);
    out.exact_order = std::log2(out.exact_error[1] / out.exact_error[2]);
    return out;
}

}  // namespace

OrderStudy time_order_study(const cusp::ModelCusp& Z, const MmsSpec& spec, double dt, Scheme scheme) {
    return order_study(Z, spec, dt, scheme, true);
}

OrderStudy space_order_study(const cusp::ModelCusp& Z, const MmsSpec& spec, double dt, Scheme scheme) {
    return order_study(Z, spec, dt, scheme, false);
}

HeatModeResult heat_mode_decay(double T, double dt, std::size_t n, Scheme scheme) {
    auto geo = CylinderGeometry::flat_torus(2.0 * std::numbers::pi, n, n);
    auto u0 = TensorField::from_function(geo.grid, {0, 0}, [](const geo::Point& p, std::span<double> c) {
        c[0] = std::sin(p[1]);
    });
    DiffusionProblem p{std::move(geo), TensorField{}, 0.5, 0.0, 2.0, T, {}, std::move(u0)};
    p.a = identity_diffusion(p.geo.grid);
    const auto traj = solve_ivp(p, {dt, scheme});
    HeatModeResult out;
    out.measured = traj.step_norms.back() / traj.step_norms.front();
    out.exact = std::exp(-T);
    out.relative_error = std::abs(out.measured - out.exact) / out.exact;
    return out;
}

MrStudy mr_study(const std::vector<double>& alphas, const std::vector<double>& lambdas,
                 const std::vector<double>& qs, const MmsSpec& base, double dt, Scheme scheme) {
    MrStudy out;
    for (double alpha : alphas)
        for (double lambda : lambdas)
            for (double q : qs)
                for (int space = 0; space < 2; ++space)
                    for (int time = 0; time < 2; ++time) {
                        MrRun r;
                        r.alpha = alpha;
                        r.lambda = lambda;
                        r.q = q;
                        r.dt = dt / static_cast<double>(1 << time);
                        r.n_s = (base.n_s - 1) * (std::size_t{1} << space) + 1;
                        out.runs.push_back(r);
                    }
    auto values = parallel_map<MaximalRegularity>(out.runs.size(), [&](std::size_t i) {
        const MrRun& r = out.runs[i];
        const cusp::ModelCusp Z(cusp::CuspCharacteristic::power(r.alpha), cusp::CuspBase::circle(),
                                cusp::CuspFlavor::cusp);
        MmsSpec s = base;
        s.lambda = r.lambda;
        s.q = r.q;
        s.n_s = r.n_s;
        const auto problem = manufactured_problem(Z, s);
        return maximal_regularity_functional(solve_ivp(problem, {r.dt, scheme}), problem);
    });
    for (std::size_t i = 0; i < values.size(); ++i) {
        out.runs[i].value = values[i];
        out.max_ratio = std::max(out.max_ratio, values[i].ratio);
    }
    for (std::size_t g = 0; g < out.runs.size(); g += 4) {
        const double r0 = out.runs[g].value.ratio;
        double d = 0.0;
        for (std::size_t j = 1; j < 4; ++j) d = std::max(d, std::abs(out.runs[g + j].value.ratio - r0) / r0);
        out.drift.push_back(d);
        out.max_drift = std::max(out.max_drift, d);
    }
    return out;
}

}  // namespace cuspfs::parabolic
