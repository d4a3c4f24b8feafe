#include <cmath>
#include <numbers>
#include <random>

#include "cuspfs/error.hpp"
#include "cuspfs/geometry/calculus.hpp"
#include "cuspfs/geometry/pullback.hpp"
#include "doctest.h"

using namespace cuspfs::geometry;
using cuspfs::MetricDegeneracyError;
using cuspfs::ValenceError;

namespace {

constexpr double kPi = std::numbers::pi;

GridPtr polar_grid(std::size_t nr, std::size_t nt) {
    // Radial nodes on a smooth non-uniform map of a uniform parameter.
    std::vector<double> r(nr);
    for (std::size_t i = 0; i < nr; ++i) {
        const double x = static_cast<double>(i) / static_cast<double>(nr - 1);
        r[i] = 0.5 + x + 0.3 * x * x;
    }
    return make_grid({Axis::from_coords(r), Axis::periodic_uniform(0.0, 2 * kPi, nt)});
}

MetricField polar_metric(const GridPtr& g) {
    return metric_from_function(g, [](const Point& p, std::span<double> c) {
        c[0] = 1.0;
        c[3] = p[0] * p[0];
    });
}

// Warped product metric with off-diagonal terms.
MetricField skew_metric(const GridPtr& g) {
    return metric_from_function(g, [](const Point& p, std::span<double> c) {
        const double r = p[0], t = p[1];
        c[0] = 1.0 + 0.2 * std::sin(t);
        c[1] = c[2] = 0.1 * r * std::cos(t);
        c[3] = r * r * (1.0 + 0.1 * r);
    });
}

TensorField random_field(const GridPtr& g, Valence v, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    TensorField f(g, v);
    for (auto& x : f.raw()) x = U(rng);
    return f;
}

}  // namespace

TEST_CASE("christoffel symbols of a hyperbolic warped metric converge at second order") {
    double err_prev = 0.0;
    for (std::size_t nr : {41, 81}) {
        auto g = polar_grid(nr, 16);
        TensorField gamma = christoffel(metric_from_function(g, [](const Point& p, std::span<double> c) {
            c[0] = 1.0;
            c[3] = std::sinh(p[0]) * std::sinh(p[0]);
        }));
        double err = 0.0;
        for (std::size_t n = 0; n < g->size(); ++n) {
            const double r = g->point(n)[0];
            // (k; i, j) with k*4 + i*2 + j
            err = std::max(err, std::abs(gamma(n, 0 * 4 + 1 * 2 + 1) + std::sinh(r) * std::cosh(r)));
            err = std::max(err, std::abs(gamma(n, 1 * 4 + 0 * 2 + 1) - 1.0 / std::tanh(r)));
            err = std::max(err, std::abs(gamma(n, 1 * 4 + 1 * 2 + 0) - 1.0 / std::tanh(r)));
            err = std::max(err, std::abs(gamma(n, 0)));
        }
        if (err_prev > 0) CHECK(std::log2(err_prev / err) > 1.9);
        err_prev = err;
    }
}

TEST_CASE("metric compatibility: nabla g vanishes, nabla g* decays at second order") {
    double prev = 0.0;
    for (std::size_t n : {1, 2}) {
        auto g = polar_grid(80 * n + 1, 64 * n);
        MetricField metric = skew_metric(g);
        Connection conn(metric);
        // The lowered Christoffel identity holds exactly for the discrete derivative.
        CHECK(bundle_norm(conn.derivative(metric.covariant()), metric).max_abs() < 1e-12);
        const double err_inv = bundle_norm(conn.derivative(metric.inverse()), metric).max_abs();
        if (prev > 0) CHECK(std::log2(prev / err_inv) > 1.9);
        prev = err_inv;
    }
}

TEST_CASE("nabla g is below tolerance on the polar metric") {
    auto g = polar_grid(101, 16);
    MetricField metric = polar_metric(g);
    Connection conn(metric);
    CHECK(bundle_norm(conn.derivative(metric.covariant()), metric).max_abs() < 5e-6);
}

TEST_CASE("complete contraction is associative") {
    auto g = polar_grid(5, 4);
    TensorField A = random_field(g, {2, 1}, 1);
    TensorField B = random_field(g, {1, 2}, 2);
    TensorField v = random_field(g, {0, 1}, 3);
    TensorField lhs = complete_contraction(complete_contraction(A, B), v);
    TensorField rhs = complete_contraction(A, complete_contraction(B, v));
    CHECK((lhs - rhs).max_abs() < 1e-13);
}

TEST_CASE("complete contraction against a scalar multiplies") {
    auto g = polar_grid(5, 4);
    TensorField A = random_field(g, {0, 2}, 4);
    TensorField s = TensorField::constant_scalar(g, 3.0);
    CHECK((complete_contraction(A, s) - 3.0 * A).max_abs() < 1e-15);
}

TEST_CASE("trace of the identity equals the dimension") {
    auto g = polar_grid(5, 4);
    TensorField tr = contract(identity_tensor(g), 1, 1);
    for (double v : tr.raw()) CHECK(v == doctest::Approx(2.0));
}

TEST_CASE("contraction agrees with explicit sums") {
    auto g = polar_grid(5, 4);
    TensorField a = random_field(g, {2, 2}, 5);
    TensorField c = contract(a, 2, 1);  // sum_p a^{i p}_{p j}
    for (std::size_t n = 0; n < g->size(); ++n)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                double acc = 0.0;
                for (int p = 0; p < 2; ++p) acc += a(n, ((i * 2 + p) * 2 + p) * 2 + j);
                CHECK(c(n, i * 2 + j) == doctest::Approx(acc));
            }
}

TEST_CASE("bundle norm rescales as rho^(tau - sigma) under conformal change") {
    auto g = polar_grid(9, 8);
    MetricField metric = skew_metric(g);
    TensorField rho = TensorField::from_function(g, {0, 0}, [](const Point& p, std::span<double> c) {
        c[0] = 0.3 + 0.2 * std::sin(p[1]) + 0.1 * p[0];
    });
    MetricField hat = conformal_rescale(metric, rho);
    for (Valence v : {Valence{0, 1}, Valence{1, 0}, Valence{1, 2}, Valence{2, 3}, Valence{0, 3}}) {
        TensorField a = random_field(g, v, 11 + static_cast<unsigned>(v.rank()));
        TensorField nh = bundle_norm(a, hat);
        TensorField n0 = bundle_norm(a, metric);
        for (std::size_t n = 0; n < g->size(); ++n) {
            const double expect = std::pow(rho.value(n), v.co - v.contra) * n0.value(n);
            CHECK(std::abs(nh.value(n) - expect) <= 1e-12 * std::max(1.0, expect));
        }
    }
}

TEST_CASE("integrate reproduces the L2 norm of r on the unit interval") {
    for (std::size_t n : {1001, 4001}) {
        auto g = make_grid({Axis::uniform(0.0, 1.0, n)});
        TensorField u = TensorField::from_function(g, {0, 0}, [](const Point& p, std::span<double> c) { c[0] = p[0]; });
        const double err = std::abs(lq_norm(u, flat_metric(g), 2.0) - 1.0 / std::sqrt(3.0));
        CHECK(err < 1e-6);
    }
}

TEST_CASE("laplace-beltrami: hessian trace matches divergence form") {
    double prev = 0.0;
    for (std::size_t n : {1, 2}) {
        const std::size_t nr = 80 * n + 1;
        auto g = polar_grid(nr, 128 * n);
        MetricField metric = skew_metric(g);
        TensorField u = TensorField::from_function(g, {0, 0}, [](const Point& p, std::span<double> c) {
            c[0] = std::sin(p[0]) * std::cos(p[1]) + p[0] * p[0];
        });
        TensorField a = laplace_beltrami(u, Connection(metric));
        TensorField b = laplace_beltrami_divergence(u, metric);
        // Compare away from the non-periodic edges where both use one-sided stencils.
        double err = 0.0;
        for (std::size_t n = 0; n < g->size(); ++n) {
            const auto ij = g->unflatten(n);
            if (ij[0] < 3 || ij[0] + 3 >= nr) continue;
            err = std::max(err, std::abs(a.value(n) - b.value(n)));
        }
        if (prev > 0) CHECK(std::log2(prev / err) > 1.8);
        prev = err;
    }
}

TEST_CASE("non positive definite metric reports the node") {
    auto g = make_grid({Axis::uniform(-1.0, 1.0, 5)});
    TensorField m = TensorField::from_function(g, {0, 2}, [](const Point& p, std::span<double> c) { c[0] = p[0] + 0.4; });
    try {
        MetricField bad(m);
        FAIL("expected a degeneracy error");
    } catch (const MetricDegeneracyError& e) {
        CHECK(e.node() == 0);
    }
}

TEST_CASE("valence above the cap is rejected") {
    auto g = make_grid({Axis::uniform(0.0, 1.0, 5)});
    CHECK_THROWS_AS(TensorField(g, {4, 3}), ValenceError);
    TensorField top(g, {3, 3});
    MetricField flat = flat_metric(g);
    CHECK_THROWS_AS(covariant_derivative(top, flat), ValenceError);
}

TEST_CASE("pullback along the arclength map turns ds^2 into dr^2 / R^2") {
    // R(t) = t^2, rho(r) = 1/r - 1; the map r -> s = rho(r) on r in [0.2, 1].
    std::vector<double> r(201), s(201);
    for (std::size_t i = 0; i < r.size(); ++i) {
        s[i] = 4.0 * static_cast<double>(i) / 200.0;
        r[r.size() - 1 - i] = 1.0 / (1.0 + s[i]);
    }
    std::vector<double> sf(801);
    for (std::size_t i = 0; i < sf.size(); ++i) sf[i] = 4.0 * static_cast<double>(i) / 800.0;
    auto rg = make_grid({Axis::from_coords(r)});
    auto sg = make_grid({Axis::from_coords(sf)});
    ChartMap F{rg, sg, [](const Point& p) { return Point{1.0 / p[0] - 1.0, 0.0}; },
               [](const Point& p) { return Jacobian{{{-1.0 / (p[0] * p[0]), 0.0}, {0.0, 1.0}}}; }};
    TensorField pulled = pullback(F, flat_metric(sg).covariant());
    for (std::size_t n = 0; n < rg->size(); ++n) {
        const double x = rg->point(n)[0];
        CHECK(pulled.value(n) == doctest::Approx(1.0 / std::pow(x, 4)).epsilon(1e-12));
    }
}

TEST_CASE("pullback respects composition") {
    auto A = make_grid({Axis::uniform(0.0, 1.0, 21), Axis::uniform(0.0, 1.0, 21)});
    auto B = make_grid({Axis::uniform(-0.5, 2.5, 121), Axis::uniform(-0.5, 2.5, 121)});
    auto C = make_grid({Axis::uniform(-2.0, 8.0, 401), Axis::uniform(-2.0, 8.0, 401)});
    ChartMap G{A, B, [](const Point& x) { return Point{x[0] + 0.2 * x[1], x[1] + 0.1 * x[0] * x[0]}; },
               [](const Point& x) { return Jacobian{{{1.0, 0.2}, {0.2 * x[0], 1.0}}}; }};
    ChartMap F{B, C, [](const Point& y) { return Point{2.0 * y[0] + y[1], y[1] * (1.0 + 0.1 * y[1])}; },
               [](const Point& y) { return Jacobian{{{2.0, 1.0}, {0.0, 1.0 + 0.2 * y[1]}}}; }};
    TensorField a = TensorField::from_function(C, {1, 1}, [](const Point& z, std::span<double> c) {
        c[0] = std::sin(z[0]);
        c[1] = z[1] * 0.3;
        c[2] = std::cos(z[1]);
        c[3] = 1.0 + 0.1 * z[0] * z[1];
    });
    TensorField direct = pullback(compose(F, G), a);
    TensorField twice = pullback(G, pullback(F, a));
    CHECK((direct - twice).max_abs() < 1e-4);
}
