#include <cmath>
#include <numbers>

#include "cuspfs/error.hpp"
#include "cuspfs/kondratiev/kondratiev.hpp"
#include "cuspfs/weighted/norms.hpp"
#include "doctest.h"

using namespace cuspfs::kondratiev;
namespace geo = cuspfs::geometry;

namespace {

constexpr double kPi = std::numbers::pi;

// Blended distance with the default radii, written out independently of the library.
double delta_oracle(double r) {
    const double x = std::clamp((r - 0.25) / 0.25, 0.0, 1.0);
    const double w = x * x * x * x * (35.0 - 84.0 * x + 70.0 * x * x - 20.0 * x * x * x);
    return (1.0 - w) * r + w;
}

template <class F>
double simpson(F f, double a, double b, int n) {
    const double h = (b - a) / n;
    double acc = f(a) + f(b);
    for (int i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return acc * h / 3.0;
}

// Radial integral over [exp(-8), 1], split at the blend radii where delta is only C^3.
template <class F>
double radial(F f) {
    return simpson(f, std::exp(-8.0), 0.25, 20000) + simpson(f, 0.25, 0.5, 20000) + simpson(f, 0.5, 1.0, 20000);
}

}  // namespace

TEST_CASE("Kondratiev norm of the constant one is the area of the disk") {
    ConicalDomain dom(DomainSpec{});
    const auto one = geo::TensorField::constant_scalar(dom.grid(), 1.0);
    CHECK(std::abs(kondratiev_norm(dom, one, 0, 0.0, 1.0) - kPi) < 1e-6);
    CHECK(kondratiev_norm(dom, 0.0 * one, 2, 1.0, 2.0) == 0.0);
    CHECK(distance_norm(dom, 0.0 * one, 2, 0.0, 2.0) == 0.0);
}

TEST_CASE("distance function follows the blend") {
    ConicalDomain dom(DomainSpec{});
    const auto& grid = *dom.grid();
    for (std::size_t n = 0; n < grid.size(); n += 7) {
        const double r = grid.point(n)[0];
        CHECK(dom.delta().value(n) == doctest::Approx(delta_oracle(r)).epsilon(1e-12));
        if (r <= 0.25) CHECK(dom.delta().value(n) == r);
        if (r >= 0.5) CHECK(dom.delta().value(n) == 1.0);
    }
}

TEST_CASE("Cartesian partials from polar samples") {
    DomainSpec spec;
    spec.n_s = 321;
    spec.n_theta = 128;
    ConicalDomain dom(spec);
    const auto u = geo::TensorField::from_function(dom.grid(), {0, 0}, [](const geo::Point& p, std::span<double> c) {
        const double x = p[0] * std::cos(p[1]), y = p[0] * std::sin(p[1]);
        c[0] = x * x * y + y * y;
    });
    const auto derivs = dom.conn().iterated(u, 2);
    const auto d1 = cartesian_partials(dom, derivs, 1);
    const auto d2 = cartesian_partials(dom, derivs, 2);
    REQUIRE(d1.size() == 2);
    REQUIRE(d2.size() == 3);
    const auto& grid = *dom.grid();
    for (std::size_t n = 0; n < grid.size(); n += 11) {
        const auto ij = grid.unflatten(n);
        if (ij[0] < 2 || ij[0] + 2 >= grid.extent(0) || grid.point(n)[0] < 0.1) continue;
        const double r = grid.point(n)[0];
        const double x = r * std::cos(grid.point(n)[1]), y = r * std::sin(grid.point(n)[1]);
        CHECK(std::abs(d1[0].value(n) - 2 * x * y) < 4e-3);
        CHECK(std::abs(d1[1].value(n) - (x * x + 2 * y)) < 4e-3);
        CHECK(std::abs(d2[0].value(n) - 2 * y) < 3e-2);
        CHECK(std::abs(d2[1].value(n) - 2 * x) < 3e-2);
        CHECK(std::abs(d2[2].value(n) - 2.0) < 3e-2);
    }
}

TEST_CASE("u = x on the half disk against radial quadrature") {
    DomainSpec spec;
    spec.theta1 = kPi;
    ConicalDomain dom(spec.refined(1));
    const auto u = geo::TensorField::from_function(dom.grid(), {0, 0}, [](const geo::Point& p, std::span<double> c) {
        c[0] = p[0] * std::cos(p[1]);
    });
    const double a = 0.5;
    // ||delta^-a x||_2^2 = (pi/2) int delta^-2a r^3 dr; ||delta^(1-a) * 1||_2^2 = pi int delta^(2-2a) r dr.
    const double t0 = std::sqrt(0.5 * kPi * radial([&](double r) { return std::pow(delta_oracle(r), -2 * a) * r * r * r; }));
    const double t1 = std::sqrt(kPi * radial([&](double r) { return std::pow(delta_oracle(r), 2 - 2 * a) * r; }));
    CHECK(kondratiev_norm(dom, u, 1, a, 2.0) == doctest::Approx(t0 + t1).epsilon(1e-3));
    CHECK(kondratiev_norm(dom, u, 0, a, 2.0) == doctest::Approx(t0).epsilon(1e-3));
}

TEST_CASE("distance norm of a radial profile against radial quadrature") {
    DomainSpec spec;
    spec.n_s = 4001;
    spec.n_theta = 8;
    ConicalDomain dom(spec);
    const double mu = 2.0, lambda = 0.5, q = 2.0;
    auto prof = [&](double r) { return std::pow(r, mu) * (1 - r * r) * (1 - r * r); };
    auto dprof = [&](double r) {
        return mu * std::pow(r, mu - 1) * (1 - r * r) * (1 - r * r) - 4 * r * std::pow(r, mu) * (1 - r * r);
    };
    const auto u = geo::TensorField::from_function(dom.grid(), {0, 0}, [&](const geo::Point& p, std::span<double> c) {
        c[0] = prof(p[0]);
    });
    const double e0 = -lambda - 2.0 / q, e1 = e0 + 1.0;
    const double t0 = std::sqrt(2 * kPi * radial([&](double r) { return std::pow(delta_oracle(r), 2 * e0) * prof(r) * prof(r) * r; }));
    const double t1 = std::sqrt(2 * kPi * radial([&](double r) { return std::pow(delta_oracle(r), 2 * e1) * dprof(r) * dprof(r) * r; }));
    CHECK(distance_norm(dom, u, 0, lambda, q) == doctest::Approx(t0).epsilon(1e-5));
    CHECK(distance_norm(dom, u, 1, lambda, q) == doctest::Approx(t0 + t1).epsilon(1e-5));
}

TEST_CASE("distance norm is the classical norm where delta = 1") {
    ConicalDomain dom(DomainSpec{});
    const auto u = geo::TensorField::from_function(dom.grid(), {0, 0}, [](const geo::Point& p, std::span<double> c) {
        const double x = std::max(0.0, p[0] - 0.55);
        c[0] = x * x * x * x * std::cos(p[1]);
    });
    for (double q : {1.0, 2.0, 3.0})
        CHECK(distance_norm(dom, u, 2, 0.7, q) == cuspfs::weighted::sobolev_norm(u, dom.conn(), 2, q));
}

TEST_CASE("distance norm equals the weighted norm of the glued singularity function") {
    ConicalDomain dom(DomainSpec{});
    const auto corpus = cuspfs::weighted::make_corpus(3);
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const auto u = cuspfs::weighted::evaluate(corpus, i, dom.discretization());
        const geo::Connection glued_conn(dom.glued().gbar);
        const double w = cuspfs::weighted::weighted_sobolev_norm(u, glued_conn, dom.glued().rho, {2, 0.5, 2.0});
        CHECK(distance_norm(dom, u, 2, 0.5, 2.0) / w == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("order zero Kondratiev ratio is one") {
    ConicalDomain dom(DomainSpec{});
    const auto corpus = cuspfs::weighted::make_corpus(8);
    for (auto [a, q] : {std::pair{1.0, 2.0}, {0.0, 1.0}, {2.0, 3.0}})
        for (double r : kondratiev_ratios(dom, corpus, 0, a, q)) CHECK(std::abs(r - 1.0) < 1e-12);
}

TEST_CASE("Kondratiev equivalence brackets are small and stable") {
    DomainSpec spec;
    spec.n_s = 81;
    spec.n_theta = 32;
    const auto corpus = cuspfs::weighted::make_corpus(21);
    for (int k : {1, 2}) {
        const auto rep = kondratiev_equivalence_report(spec, corpus, k, 1.0, 2.0);
        CHECK(rep.fine.C <= 4.0);
        CHECK(rep.refinement_drift < 0.1);
        CHECK(rep.blend_drift < 0.1);
    }
}

TEST_CASE("Cartesian and covariant derivative magnitudes are comparable") {
    ConicalDomain dom(DomainSpec{});
    const auto corpus = cuspfs::weighted::make_corpus(4);
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const auto u = cuspfs::weighted::evaluate(corpus, i, dom.discretization());
        const auto b1 = cartesian_covariant_bracket(dom, u, 1);
        CHECK(b1.first >= 1.0 - 1e-9);
        CHECK(b1.second <= std::sqrt(2.0) + 1e-9);
        const auto b2 = cartesian_covariant_bracket(dom, u, 2);
        CHECK(b2.first >= 1.0 / 3.0);
        CHECK(b2.second <= 3.0);
    }
}

TEST_CASE("invalid Kondratiev parameters") {
    ConicalDomain dom(DomainSpec{});
    const auto one = geo::TensorField::constant_scalar(dom.grid(), 1.0);
    CHECK_THROWS_AS(kondratiev_norm(dom, one, 0, 0.0, 0.5), cuspfs::DomainError);
    CHECK_THROWS_AS(kondratiev_norm(dom, one, 3, 0.0, 2.0), cuspfs::DomainError);
    CHECK_THROWS_AS(distance_norm(dom, one, 3, 0.0, 2.0), cuspfs::DomainError);
    DomainSpec bad;
    bad.theta1 = 7.0;
    CHECK_THROWS_AS(ConicalDomain{bad}, cuspfs::DomainError);
    CHECK_THROWS_AS(kondratiev_ratios(dom, cuspfs::weighted::make_corpus(1, 3), 1, 1.0, 2.0), cuspfs::DomainError);
}
