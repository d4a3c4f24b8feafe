#include <cmath>
#include <numbers>

#include "cuspfs/error.hpp"
#include "cuspfs/parabolic/study.hpp"
#include "cuspfs/weighted/norms.hpp"
#include "doctest.h"

using namespace cuspfs::parabolic;
namespace geo = cuspfs::geometry;
using cuspfs::cusp::CuspBase;
using cuspfs::cusp::CuspCharacteristic;
using cuspfs::cusp::CuspFlavor;
using cuspfs::cusp::ModelCusp;
using cuspfs::weighted::weight_map;

namespace {

constexpr double kPi = std::numbers::pi;

ModelCusp power_cusp(double alpha, CuspBase base = CuspBase::circle()) {
    return ModelCusp(CuspCharacteristic::power(alpha), base, CuspFlavor::cusp);
}

// Largest |a - b| over nodes at least `margin` nodes away from the ends of axis 0.
double interior_gap(const TensorField& a, const TensorField& b, std::size_t margin) {
    const auto& g = *a.grid();
    double out = 0.0;
    for (std::size_t n = 0; n < g.size(); ++n) {
        const auto ij = g.unflatten(n);
        if (ij[0] < margin || ij[0] + margin >= g.extent(0)) continue;
        out = std::max(out, std::abs(a.value(n) - b.value(n)));
    }
    return out;
}

TensorField smooth_field(const geo::GridPtr& grid) {
    return TensorField::from_function(grid, {0, 0}, [](const geo::Point& p, std::span<double> c) {
        c[0] = std::cos(p[0]) * (1.0 + 0.3 * std::sin(p[1]));
    });
}

}  // namespace

TEST_CASE("Laplace-Beltrami of x^2 + y^2 on the plane is 4") {
    auto grid = geo::make_grid({geo::Axis::uniform(-1, 1, 21), geo::Axis::uniform(-1, 1, 21)});
    geo::Connection conn(geo::flat_metric(grid));
    const auto u = TensorField::from_function(grid, {0, 0}, [](const geo::Point& p, std::span<double> c) {
        c[0] = p[0] * p[0] + p[1] * p[1];
    });
    const auto lap = geo::laplace_beltrami(u, conn);
    for (std::size_t n = 0; n < lap.nodes(); ++n) CHECK(std::abs(lap.value(n) - 4.0) < 1e-9);
}

TEST_CASE("Laplace-Beltrami of sin s sin theta on the flat cylinder is -2u") {
    auto grid = geo::make_grid({geo::Axis::uniform(0.9, 1.1, 81), geo::Axis::periodic_uniform(0.0, 2 * kPi, 1800)});
    geo::Connection conn(geo::flat_metric(grid));
    const auto u = TensorField::from_function(grid, {0, 0}, [](const geo::Point& p, std::span<double> c) {
        c[0] = std::sin(p[0]) * std::sin(p[1]);
    });
    CHECK(interior_gap(geo::laplace_beltrami(u, conn), -2.0 * u, 3) < 1e-5);
}

TEST_CASE("Laplace-Beltrami of t^2 on the cone is 4") {
    auto grid = geo::make_grid({geo::Axis::uniform(0.1, 1.0, 91), geo::Axis::periodic_uniform(0.0, 2 * kPi, 16)});
    geo::Connection conn(geo::metric_from_function(grid, [](const geo::Point& p, std::span<double> c) {
        c[0] = 1.0;
        c[3] = p[0] * p[0];
    }));
    const auto u = TensorField::from_function(grid, {0, 0}, [](const geo::Point& p, std::span<double> c) { c[0] = p[0] * p[0]; });
    const auto lap = geo::laplace_beltrami(u, conn);
    for (std::size_t n = 0; n < lap.nodes(); ++n) CHECK(std::abs(lap.value(n) - 4.0) < 1e-5);
}

TEST_CASE("trivial weight and identity diffusion give minus the Laplacian") {
    const auto geo = CylinderGeometry::flat_torus(2 * kPi, 24, 16);
    const auto op = desingularize_operator(geo, identity_diffusion(geo.grid), 0.0);
    CHECK((op.a2 - geo.hat_conn.metric().inverse()).max_abs() < 1e-10);
    CHECK(op.a1.max_abs() < 1e-10);
    CHECK(op.a0.max_abs() < 1e-10);
    const auto u = smooth_field(geo.grid);
    CHECK((apply_cylinder_operator(op, geo, u) + geo::laplace_beltrami(u, geo.hat_conn)).max_abs() < 1e-10);
}

TEST_CASE("principal part on a power cusp is the regularized co-metric") {
    for (double alpha : {1.0, 2.0}) {
        const auto geo = CylinderGeometry::from_cusp(power_cusp(alpha), 4.0, 41, 8);
        for (double lambda : {-1.0, 0.0, 1.5}) {
            const auto op = desingularize_operator(geo, identity_diffusion(geo.grid), lambda);
            CHECK((op.a2 - geo.hat_conn.metric().inverse()).max_abs() == 0.0);
        }
    }
}

TEST_CASE("conjugation consistency on a one-dimensional cusp") {
    for (double alpha : {1.0, 2.0}) {
        const auto geo = CylinderGeometry::from_cusp(power_cusp(alpha, CuspBase::point()), 3.0, 4001, 1);
        const auto a = anisotropic_diffusion(geo.grid, 0.5);
        const auto u = smooth_field(geo.grid);
        for (double lambda : {-1.0, 0.0, 1.5}) {
            const auto op = desingularize_operator(geo, a, lambda);
            const auto expect = weight_map(apply_singular_operator(geo.conn, a, u), 2.0 - lambda, geo.rho);
            const auto u_hat = weight_map(u, -lambda, geo.rho);
            const double scale = expect.max_abs();
            CHECK(interior_gap(apply_cylinder_operator(op, geo, u_hat), expect, 2) < 1e-5 * scale);
            CHECK(interior_gap(apply_discrete_operator(op, geo, u_hat), expect, 2) < 1e-5 * scale);
        }
    }
}

TEST_CASE("conjugation consistency converges at second order on a surface cusp") {
    for (double lambda : {-1.0, 1.5}) {
        double gap[2];
        for (int level = 0; level < 2; ++level) {
            const auto geo = CylinderGeometry::from_cusp(power_cusp(2.0), 3.0, 200 * (1 << level) + 1, 32 << level);
            const auto a = anisotropic_diffusion(geo.grid, 0.5);
            const auto u = smooth_field(geo.grid);
            const auto op = desingularize_operator(geo, a, lambda);
            const auto expect = weight_map(apply_singular_operator(geo.conn, a, u), 2.0 - lambda, geo.rho);
            gap[level] = interior_gap(apply_discrete_operator(op, geo, weight_map(u, -lambda, geo.rho)), expect, 2);
        }
        CHECK(std::log2(gap[0] / gap[1]) > 1.8);
    }
}

TEST_CASE("ellipticity is transported to the principal part") {
    const auto geo = CylinderGeometry::from_cusp(power_cusp(2.0), 4.0, 61, 16);
    for (double strength : {0.0, 0.5, 2.0}) {
        const auto a = anisotropic_diffusion(geo.grid, strength);
        const auto e = ellipticity(a, geo.conn.metric());
        const auto ehat = principal_ellipticity(desingularize_operator(geo, a, 1.0).a2, geo.hat_conn.metric());
        CHECK(e.bound == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(ehat.bound == doctest::Approx(e.bound).epsilon(1e-12));
    }
    DiffusionProblem p{geo, 0.25 * identity_diffusion(geo.grid), 0.5, 0.0, 2.0, 1.0, {}, TensorField(geo.grid, {0, 0})};
    CHECK_THROWS_WITH_AS(desingularize_operator(p), doctest::Contains("at node"), cuspfs::DomainError);
    p.epsilon = 0.0;
    CHECK_THROWS_AS(desingularize_operator(p), cuspfs::DomainError);
}

TEST_CASE("zero data give the zero solution and a zero functional") {
    const auto geo = CylinderGeometry::from_cusp(power_cusp(2.0), 4.0, 41, 8);
    DiffusionProblem p{geo, identity_diffusion(geo.grid), 0.5, 1.0, 2.0, 0.1, {}, TensorField(geo.grid, {0, 0})};
    const auto traj = solve_ivp(p, {0.01, Scheme::implicit_euler});
    CHECK(traj.times.size() == 11);
    for (const auto& u : traj.u) CHECK(u.max_abs() == 0.0);
    CHECK(maximal_regularity_functional(traj, p).ratio == 0.0);
}

TEST_CASE("invalid time steps and schemes are rejected") {
    const auto geo = CylinderGeometry::from_cusp(power_cusp(1.0), 4.0, 41, 8);
    DiffusionProblem p{geo, identity_diffusion(geo.grid), 0.5, 0.0, 2.0, 0.1, {}, TensorField(geo.grid, {0, 0})};
    CHECK_THROWS_AS(solve_ivp(p, {0.2, Scheme::implicit_euler}), cuspfs::DomainError);
    CHECK_THROWS_AS(solve_ivp(p, {0.0, Scheme::implicit_euler}), cuspfs::DomainError);
    CHECK_THROWS_AS(solve_ivp(p, {0.03, Scheme::implicit_euler}), cuspfs::DomainError);
    CHECK_THROWS_AS(parse_scheme("explicit-euler"), cuspfs::ConfigError);
    CHECK(parse_scheme("crank-nicolson") == Scheme::crank_nicolson);
    CHECK(scheme_name(Scheme::implicit_euler) == "implicit-euler");
}

TEST_CASE("heat mode on the flat torus decays like exp(-t)") {
    for (Scheme s : {Scheme::implicit_euler, Scheme::crank_nicolson}) {
        const auto r = heat_mode_decay(0.5, 1e-3, 32, s);
        CHECK(r.exact == doctest::Approx(std::exp(-0.5)));
        CHECK(r.relative_error < 0.01);
    }
}

TEST_CASE("symmetric systems are detected") {
    const auto torus = CylinderGeometry::flat_torus(2 * kPi, 16, 16);
    DiffusionProblem p{torus, identity_diffusion(torus.grid), 0.5, 0.0, 2.0, 0.01, {}, smooth_field(torus.grid)};
    CHECK(solve_ivp(p, {0.01, Scheme::implicit_euler}).symmetric);
    MmsSpec spec;
    spec.lambda = 1.0;
    spec.T = 0.01;
    CHECK_FALSE(solve_ivp(manufactured_problem(power_cusp(2.0), spec), {0.01, Scheme::implicit_euler}).symmetric);
}

TEST_CASE("manufactured profile derivatives") {
    const double h = 1e-5;
    for (double s : {0.3, 1.1, 2.4}) {
        const auto p = mms_profile(s, 6.0);
        CHECK(p[1] == doctest::Approx((mms_profile(s + h, 6.0)[0] - mms_profile(s - h, 6.0)[0]) / (2 * h)).epsilon(1e-7));
        CHECK(p[2] == doctest::Approx((mms_profile(s + h, 6.0)[1] - mms_profile(s - h, 6.0)[1]) / (2 * h)).epsilon(1e-7));
    }
    CHECK(mms_profile(3.0, 6.0)[0] == 0.0);
    CHECK(mms_profile(0.0, 6.0)[0] == 0.0);
}

TEST_CASE("manufactured source is consistent with the singular operator") {
    const auto Z = power_cusp(2.0);
    MmsSpec spec;
    spec.lambda = 1.0;
    spec.n_s = 1201;
    spec.n_theta = 8;
    const auto p = manufactured_problem(Z, spec);
    // f = du/dt + A u with u = exp(-t) u0: at t = 0, f = -u0 + A u0.
    const auto Au = apply_singular_operator(p.geo.conn, p.a, p.u0);
    const auto f = p.source(0.0);
    const auto expect = Au - p.u0;
    CHECK(interior_gap(f, expect, 2) < 1e-4 * expect.max_abs());
}

TEST_CASE("implicit Euler converges at first order in time and second order in space") {
    const auto Z = power_cusp(2.0);
    MmsSpec spec;
    spec.lambda = 1.0;
    const auto t = time_order_study(Z, spec, 4e-3, Scheme::implicit_euler);
    CHECK(t.observed_order > 0.9);
    CHECK(t.observed_order < 1.1);
    const auto s = space_order_study(Z, spec, 4e-3, Scheme::implicit_euler);
    CHECK(s.observed_order > 1.8);
    CHECK(s.observed_order < 2.2);
    CHECK(s.exact_error[2] < s.exact_error[0]);
}

TEST_CASE("Crank-Nicolson converges at second order in time") {
    MmsSpec spec;
    spec.lambda = 0.0;
    const auto t = time_order_study(power_cusp(1.0), spec, 2e-2, Scheme::crank_nicolson);
    CHECK(t.observed_order > 1.8);
}

TEST_CASE("the solution map is linear") {
    MmsSpec spec;
    spec.lambda = 1.0;
    spec.T = 0.05;
    auto p = manufactured_problem(power_cusp(2.0), spec);
    const auto base = solve_ivp(p, {0.01, Scheme::implicit_euler});
    auto src = p.source;
    p.source = [src](double t) { return 2.0 * src(t); };
    p.u0 *= 2.0;
    const auto doubled = solve_ivp(p, {0.01, Scheme::implicit_euler});
    for (std::size_t n = 0; n < base.u.size(); ++n)
        CHECK((doubled.u[n] - 2.0 * base.u[n]).max_abs() <= 1e-10 * std::max(1.0, base.u[n].max_abs()));
}

TEST_CASE("maximal-regularity ratio is bounded and refinement stable") {
    MmsSpec spec;
    spec.T = 0.2;
    const auto study = mr_study({2.0}, {1.0}, {2.0, 4.0}, spec, 1e-2, Scheme::implicit_euler);
    CHECK(study.runs.size() == 8);
    CHECK(study.drift.size() == 2);
    CHECK(study.max_ratio < 10.0);
    CHECK(study.max_ratio > 0.0);
    CHECK(study.max_drift < 0.1);
}
