#include <cmath>
#include <numbers>

#include "cuspfs/cusp/characteristic.hpp"
#include "cuspfs/cusp/glue.hpp"
#include "cuspfs/cusp/model_cusp.hpp"
#include "cuspfs/error.hpp"
#include "cuspfs/geometry/calculus.hpp"
#include "cuspfs/geometry/pullback.hpp"
#include "doctest.h"

using namespace cuspfs::cusp;
using cuspfs::DomainError;
namespace geo = cuspfs::geometry;

namespace {

// Composite Simpson rule in x = log t, used as an independent quadrature oracle.
double simpson_arclength(const CuspCharacteristic& R, double t, int n) {
    const double a = std::log(t), b = 0.0, h = (b - a) / n;
    auto f = [&](double x) { return std::exp(x) / R.value(std::exp(x)); };
    double acc = f(a) + f(b);
    for (int i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return acc * h / 3.0;
}

}  // namespace

TEST_CASE("power characteristic c(1) equals alpha") {
    const auto R = make_characteristic({CharacteristicKind::power, 2.0});
    const auto c = validate_characteristic(R, 4, log_grid(1e-8, 1.0, 2048));
    CHECK(c[0] == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(c[1] == doctest::Approx(2.0).epsilon(1e-9));  // R R'' = 2 t^2
    CHECK(c[2] == 0.0);
}

TEST_CASE("exponential characteristic bounds are finite and c(1) = 4/e for alpha = beta = 1") {
    const auto R = make_characteristic({CharacteristicKind::exponential, 1.0, 1.0});
    const auto c = validate_characteristic(R, 4, log_grid(1e-8, 1.0, 2048));
    CHECK(c[0] == doctest::Approx(4.0 / std::exp(1.0)).epsilon(1e-4));
    for (double v : c) CHECK(std::isfinite(v));
}

TEST_CASE("exponential derivatives agree with finite differences") {
    const auto R = CuspCharacteristic::exponential(1.5, 0.7);
    for (double t : {0.3, 0.6, 0.9}) {
        const double h = 1e-4;
        for (int k = 1; k <= 3; ++k) {
            const double fd = (R.derivative(t + h, k - 1) - R.derivative(t - h, k - 1)) / (2 * h);
            CHECK(R.derivative(t, k) == doctest::Approx(fd).epsilon(1e-6));
        }
    }
}

TEST_CASE("invalid characteristics are rejected") {
    CHECK_THROWS_AS(make_characteristic({CharacteristicKind::power, 0.5}), DomainError);
    CHECK_THROWS_AS(make_characteristic({CharacteristicKind::exponential, -1.0, 1.0}), DomainError);
    CHECK_THROWS_AS(make_characteristic({CharacteristicKind::exponential, 1.0, 0.0}), DomainError);
    // R = 1 has a finite integral of dt/R.
    CharacteristicSpec flat{CharacteristicKind::sampled};
    flat.t = log_grid(1e-8, 1.0, 64);
    flat.r.assign(64, 1.0);
    CHECK_THROWS_AS(make_characteristic(flat), DomainError);
}

TEST_CASE("sampled characteristic reproduces a power law") {
    CharacteristicSpec spec{CharacteristicKind::sampled};
    spec.t = log_grid(1e-8, 1.0, 400);
    for (double t : spec.t) spec.r.push_back(t * t);
    const auto R = make_characteristic(spec);
    CHECK(R.value(0.37) == doctest::Approx(0.37 * 0.37).epsilon(1e-8));
    CHECK(R.derivative(0.37, 1) == doctest::Approx(0.74).epsilon(1e-6));
    CHECK(R.derivative(0.37, 2) == doctest::Approx(2.0).epsilon(1e-3));
}

TEST_CASE("divergence certificate grows monotonically") {
    const auto cert = certify_characteristic(CuspCharacteristic::power(1.0));
    for (std::size_t i = 1; i < cert.partial.size(); ++i) CHECK(cert.partial[i] > cert.partial[i - 1]);
    CHECK(cert.partial.back() == doctest::Approx(-std::log(1e-8)).epsilon(1e-10));
}

TEST_CASE("arclength maps of power characteristics") {
    ArclengthMap rho1(CuspCharacteristic::power(1.0));
    CHECK(std::abs(rho1(std::exp(-2.0)) - 2.0) < 1e-10);
    ArclengthMap rho2(CuspCharacteristic::power(2.0));
    for (double s : {0.9, 0.5, 0.1, 0.01}) CHECK(std::abs(rho2(s) - (1.0 / s - 1.0)) < 1e-10 * (1.0 / s));
    for (double s : {0.0, 0.3, 2.0, 17.5, 90.0}) {
        const double t = rho2.inverse(s);
        CHECK(std::abs(rho2(t) - s) < 1e-12 * std::max(1.0, s));
        CHECK(std::abs(t - 1.0 / (1.0 + s)) < 1e-12);
    }
    CHECK(rho2.derivative(0.5) == doctest::Approx(-4.0));
}

TEST_CASE("quadratic arclength map on a dense log grid down to 1e-6") {
    ArclengthMap rho2(CuspCharacteristic::power(2.0));
    for (double t : log_grid(1e-6, 1.0, 257)) {
        const double s = rho2(t);
        CHECK(std::abs(s - (1.0 / t - 1.0)) <= 1e-10 * (1.0 / t));
        CHECK(std::abs(rho2.inverse(s) - t) <= 1e-12 * t);
    }
}

TEST_CASE("arclength map of an exponential cusp matches Simpson quadrature") {
    const auto R = CuspCharacteristic::exponential(1.0, 1.0);
    ArclengthMap rho(R);
    for (double t : {0.9, 0.4, 0.2}) CHECK(rho(t) == doctest::Approx(simpson_arclength(R, t, 20000)).epsilon(1e-9));
    const double t = rho.inverse(3.0);
    CHECK(std::abs(rho(t) - 3.0) < 1e-12);
}

TEST_CASE("cone over a circle: embedding metric equals the model metric") {
    ModelCusp Z(CuspCharacteristic::power(1.0), CuspBase::circle(), CuspFlavor::cone);
    const auto mesh = Z.stretched_mesh(6.0, 121, 16);
    const auto [lo, hi] = geo::metric_equivalence_ratio(Z.metric(mesh), Z.embedding_metric(mesh));
    CHECK(std::abs(lo - 1.0) < 1e-12);
    CHECK(std::abs(hi - 1.0) < 1e-12);
}

TEST_CASE("quadratic cusp in R^3: metric ratio spans [1, 5]") {
    ModelCusp Z(CuspCharacteristic::power(2.0), CuspBase::circle(), CuspFlavor::cusp);
    const auto mesh = Z.stretched_mesh(20.0, 201, 16);
    const auto [lo, hi] = geo::metric_equivalence_ratio(Z.metric(mesh), Z.embedding_metric(mesh));
    CHECK(std::abs(lo - 1.0) < 1e-12);
    CHECK(std::abs(hi - 5.0) < 1e-6);
}

TEST_CASE("cone flavor requires R(t) = t") {
    CHECK_THROWS_AS(ModelCusp(CuspCharacteristic::power(2.0), CuspBase::circle(), CuspFlavor::cone), DomainError);
}

TEST_CASE("conformal metric is the flat cylinder in arclength coordinates") {
    for (double alpha : {1.0, 2.0}) {
        ModelCusp Z(CuspCharacteristic::power(alpha), CuspBase::circle(), CuspFlavor::cusp);
        const auto st = Z.stretched_mesh(5.0, 81, 8);
        const auto cy = Z.cylinder_mesh(5.0, 81, 8);
        geo::MetricField ghat = geo::conformal_rescale(Z.metric(st), Z.singularity_function(st));
        const auto& R = Z.characteristic();
        const auto& arc = Z.arclength();
        geo::ChartMap F{cy.grid, st.grid,
                        [&arc](const geo::Point& p) { return geo::Point{arc.inverse(p[0]), p[1]}; },
                        [&arc, &R](const geo::Point& p) {
                            return geo::Jacobian{{{-R.value(arc.inverse(p[0])), 0.0}, {0.0, 1.0}}};
                        }};
        geo::TensorField pulled = geo::pullback(F, ghat.covariant());
        for (std::size_t n = 0; n < pulled.nodes(); ++n) {
            CHECK(std::abs(pulled(n, 0) - 1.0) < 1e-10);
            CHECK(std::abs(pulled(n, 1)) < 1e-10);
            CHECK(std::abs(pulled(n, 3) - 1.0) < 1e-10);
        }
        // The cylinder-coordinate metric divided by rho^2 is exactly flat as well.
        geo::MetricField gcy = geo::conformal_rescale(Z.metric(cy), Z.singularity_function(cy));
        for (std::size_t n = 0; n < cy.grid->size(); ++n) CHECK(std::abs(gcy.covariant()(n, 0) - 1.0) < 1e-12);
    }
}

TEST_CASE("singularity bound on the one-dimensional cone") {
    ModelCusp Z(CuspCharacteristic::power(1.0), CuspBase::point(), CuspFlavor::cone);
    const auto mesh = Z.stretched_mesh(8.0, 801, 1);
    CHECK(singularity_bound(Z, mesh, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(singularity_bound(Z, mesh, 1) == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("singularity bound of the quadratic cusp is stable under refinement") {
    ModelCusp Z(CuspCharacteristic::power(2.0), CuspBase::circle(), CuspFlavor::cusp);
    for (int k = 0; k <= 2; ++k) {
        const double coarse = singularity_bound(Z, Z.stretched_mesh(6.0, 161, 16), k);
        const double fine = singularity_bound(Z, Z.stretched_mesh(6.0, 321, 16), k);
        CHECK(std::isfinite(coarse));
        CHECK(std::abs(fine - coarse) < 0.05 * fine);
    }
    CHECK(singularity_bound(Z, Z.stretched_mesh(6.0, 161, 16), 0) == doctest::Approx(2.0).epsilon(0.02));
}

TEST_CASE("smooth step is C^3 at both ends") {
    for (int order = 1; order <= 3; ++order) {
        CHECK(std::abs(smooth_step_derivative(1e-9, order)) < 1e-6);
        CHECK(std::abs(smooth_step_derivative(1.0 - 1e-9, order)) < 1e-6);
    }
    CHECK(smooth_step(0.5) == doctest::Approx(0.5));
    for (double x : {0.2, 0.5, 0.7}) {
        const double h = 1e-5;
        CHECK(smooth_step_derivative(x, 1) == doctest::Approx((smooth_step(x + h) - smooth_step(x - h)) / (2 * h)).epsilon(1e-7));
    }
}

TEST_CASE("glued singularity function is monotone and blends correctly") {
    ModelCusp Z(CuspCharacteristic::power(2.0), CuspBase::circle(), CuspFlavor::cusp);
    const auto mesh = Z.stretched_mesh(8.0, 161, 8);
    auto outer = [](const geo::Point& p, std::span<double> c) {
        c[0] = 1.0 + 0.5 * p[0];
        c[3] = 0.5 + 0.25 * std::cos(p[1]) * std::cos(p[1]);
    };
    const GluedManifold M = glue_cusp(Z, mesh, {0.25, 0.5}, outer);
    const auto& R = Z.characteristic();
    const std::size_t n1 = mesh.grid->extent(1);
    for (std::size_t i = 0; i < mesh.t.size(); ++i) {
        const double t = mesh.t[i];
        const double r = M.rho.value(mesh.grid->node(i, 0));
        if (t <= 0.25) CHECK(r == doctest::Approx(R.value(t)));
        if (t >= 0.5) CHECK(r == doctest::Approx(1.0));
        if (i > 0) CHECK(r >= M.rho.value(mesh.grid->node(i - 1, 0)));
        CHECK(r > 0.0);
        CHECK(r <= 1.0);
    }
    CHECK(n1 == 8);
    CHECK_THROWS_AS(glue_cusp(Z, mesh, {0.5, 0.25}, outer), DomainError);
}
