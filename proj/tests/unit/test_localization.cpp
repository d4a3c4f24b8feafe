#include <cmath>
#include <numbers>
#include <random>

#include "cuspfs/error.hpp"
#include "cuspfs/geometry/calculus.hpp"
#include "cuspfs/localization/atlas.hpp"
#include "doctest.h"

using namespace cuspfs::localization;
namespace geo = cuspfs::geometry;

namespace {

geo::GridPtr cylinder(double length, std::size_t ns, std::size_t ntheta) {
    std::vector<geo::Axis> axes{geo::Axis::uniform(0.0, length, ns)};
    if (ntheta > 0) axes.push_back(geo::Axis::periodic_uniform(0.0, 2 * std::numbers::pi, ntheta));
    return geo::make_grid(std::move(axes));
}

geo::TensorField smooth_field(const geo::GridPtr& grid, double a, double b) {
    return geo::TensorField::from_function(grid, {0, 0}, [=](const geo::Point& p, std::span<double> c) {
        c[0] = std::exp(-a * p[0]) * (1.0 + 0.5 * std::sin(b * p[0] + 2.0 * p[1]));
    });
}

}  // namespace

TEST_CASE("one-dimensional atlas of length 4 with overlap one half") {
    const auto atlas = build_cylinder_atlas(cylinder(4.0, 401, 0), 0.5);
    CHECK(atlas.charts.size() == 4);
    CHECK(atlas.multiplicity == 2);
}

TEST_CASE("atlas over the circle has multiplicity at most four when r >= 1/2") {
    const auto atlas = build_cylinder_atlas(cylinder(6.0, 121, 64), 0.6);
    CHECK(atlas.multiplicity <= 4);
    CHECK(atlas.per_axis[1] == 6);
}

TEST_CASE("shrunk boxes cover every node") {
    for (double r : {0.4, 0.6}) {
        const auto atlas = build_cylinder_atlas(cylinder(5.0, 101, 48), r);
        const auto& g = *atlas.grid;
        for (std::size_t n = 0; n < g.size(); ++n) {
            const auto p = g.point(n);
            bool covered = false;
            for (const auto& c : atlas.charts) {
                double dth = std::remainder(p[1] - c.center[1], 2 * std::numbers::pi);
                if (std::abs(p[0] - c.center[0]) <= r && std::abs(dth) <= r) covered = true;
            }
            CHECK(covered);
        }
    }
}

TEST_CASE("invalid atlas parameters are rejected") {
    CHECK_THROWS_AS(build_cylinder_atlas(cylinder(4.0, 101, 0), 0.95), cuspfs::DomainError);
    CHECK_THROWS_AS(build_cylinder_atlas(cylinder(1.5, 101, 0), 0.5), cuspfs::DomainError);
}

TEST_CASE("partition of unity and cutoff") {
    const auto sys = build_localization(build_cylinder_atlas(cylinder(6.0, 121, 64), 0.5));
    std::vector<double> sum(sys.atlas.grid->size(), 0.0);
    for (std::size_t k = 0; k < sys.pi.size(); ++k) {
        const auto& nodes = sys.atlas.charts[k].global_nodes;
        for (std::size_t j = 0; j < nodes.size(); ++j) {
            const double p = sys.pi[k][j];
            CHECK(p >= 0.0);
            CHECK(p <= 1.0);
            CHECK(sys.chi[k][j] * p == p);
            sum[nodes[j]] += p * p;
        }
    }
    for (double s : sum) CHECK(std::abs(s - 1.0) < 1e-12);
}

TEST_CASE("single chart: pi is one and the retraction is the identity") {
    auto grid = geo::make_grid({geo::Axis::uniform(0.0, 1.5, 61)});
    const auto sys = build_localization(build_box_atlas(grid, {{0.75}}, 0.8));
    for (double p : sys.pi[0]) CHECK(p == doctest::Approx(1.0).epsilon(1e-15));
    auto u = smooth_field(grid, 0.3, 1.0);
    const auto fam = coretract(sys, u);
    const auto back = retract(sys, fam);
    for (std::size_t n = 0; n < u.nodes(); ++n) CHECK(std::abs(back.value(n) - u.value(n)) < 1e-15);
    CHECK(localized_norm(sys, u, 2, 2.0).total == doctest::Approx(flat_sobolev_norm(u, 2, 2.0)).epsilon(1e-14));
}

TEST_CASE("coretraction of zero and one") {
    const auto sys = build_localization(build_cylinder_atlas(cylinder(5.0, 101, 48), 0.5));
    const auto zero = coretract(sys, geo::TensorField::constant_scalar(sys.atlas.grid, 0.0));
    for (const auto& v : zero) CHECK(v.max_abs() == 0.0);
    const auto one = coretract(sys, geo::TensorField::constant_scalar(sys.atlas.grid, 1.0));
    for (std::size_t k = 0; k < one.size(); ++k)
        for (std::size_t j = 0; j < one[k].nodes(); ++j) CHECK(one[k].value(j) == sys.pi[k][j]);
}

TEST_CASE("retraction is a left inverse of the coretraction") {
    for (double r : {0.4, 0.6}) {
        const auto sys = build_localization(build_cylinder_atlas(cylinder(6.0, 121, 64), r));
        auto u = smooth_field(sys.atlas.grid, 0.4, 2.0);
        const auto back = retract(sys, coretract(sys, u));
        CHECK((back - u).max_abs() < 1e-12);
    }
    const auto sys = build_localization(build_cylinder_atlas(cylinder(6.0, 121, 64), 0.5));
    CHECK_THROWS_AS(retract(sys, {}), cuspfs::DomainError);
}

TEST_CASE("chart L2 masses add up to the global L2 norm") {
    const auto sys = build_localization(build_cylinder_atlas(cylinder(6.0, 241, 96), 0.5));
    auto u = smooth_field(sys.atlas.grid, 0.5, 1.5);
    double local = 0.0;
    for (const auto& v : coretract(sys, u)) local += geo::integrate(v, geo::flat_metric(v.grid()), 2.0);
    const double global = geo::integrate(u, geo::flat_metric(sys.atlas.grid), 2.0);
    CHECK(std::abs(local - global) < 2e-3 * global);
}

TEST_CASE("localized L2 norm of order zero equals the global L2 norm") {
    for (double r : {0.4, 0.6}) {
        const auto sys = build_localization(build_cylinder_atlas(cylinder(6.0, 241, 96), r));
        auto u = smooth_field(sys.atlas.grid, 1.0, 2.0);
        const double global = geo::lq_norm(u, geo::flat_metric(sys.atlas.grid), 2.0);
        CHECK(localized_norm(sys, u, 0, 2.0).total == doctest::Approx(global).epsilon(2e-3));
    }
}

TEST_CASE("localized norms of higher order are bounded multiples of the global norm") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> da(1.0, 2.0), db(0.5, 2.5);
    for (int f = 0; f < 4; ++f) {
        const double a = da(rng), b = db(rng);
        for (int k = 1; k <= 2; ++k) {
            for (double q : {1.0, 2.0}) {
                const auto sys = build_localization(build_cylinder_atlas(cylinder(6.0, 121, 64), 0.5));
                auto u = smooth_field(sys.atlas.grid, a, b);
                const auto loc = localized_norm(sys, u, k, q);
                CHECK(loc.chart_norms.size() == sys.atlas.charts.size());
                const double ratio = loc.total / flat_sobolev_norm(u, k, q);
                CHECK(ratio > 0.5);
                CHECK(std::isfinite(ratio));
            }
        }
    }
}
