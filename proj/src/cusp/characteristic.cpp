#include "cuspfs/cusp/characteristic.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "cuspfs/error.hpp"

namespace cuspfs::cusp {

namespace {

// Exponent above which exp() overflows in double precision.
constexpr double kExpLimit = 700.0;

// Solve a 5x5 system by partial pivoting.
std::array<double, 5> solve5(std::array<std::array<double, 5>, 5> a, std::array<double, 5> b) {
    for (int c = 0; c < 5; ++c) {
        int p = c;
        for (int r = c + 1; r < 5; ++r)
            if (std::abs(a[r][c]) > std::abs(a[p][c])) p = r;
        std::swap(a[c], a[p]);
        std::swap(b[c], b[p]);
        for (int r = c + 1; r < 5; ++r) {
            const double f = a[r][c] / a[c][c];
            for (int k = c; k < 5; ++k) a[r][k] -= f * a[c][k];
            b[r] -= f * b[c];
        }
    }
    std::array<double, 5> x{};
    for (int r = 4; r >= 0; --r) {
        double acc = b[r];
        for (int k = r + 1; k < 5; ++k) acc -= a[r][k] * x[k];
        x[r] = acc / a[r][r];
    }
    return x;
}

}  // namespace

CuspCharacteristic CuspCharacteristic::power(double alpha) {
    if (!(alpha >= 1.0) || !std::isfinite(alpha))
        throw DomainError("power characteristic needs alpha >= 1");
    CuspCharacteristic R;
    R.kind_ = CharacteristicKind::power;
    R.alpha_ = alpha;
    return R;
}

CuspCharacteristic CuspCharacteristic::exponential(double alpha, double beta) {
    if (!(alpha > 0) || !(beta > 0) || !std::isfinite(alpha) || !std::isfinite(beta))
        throw DomainError("exponential characteristic needs alpha > 0 and beta > 0");
    CuspCharacteristic R;
    R.kind_ = CharacteristicKind::exponential;
    R.alpha_ = alpha;
    R.beta_ = beta;
    return R;
}

CuspCharacteristic CuspCharacteristic::sampled(std::vector<double> t, std::vector<double> r) {
    if (t.size() != r.size() || t.size() < 5)
        throw DomainError("sampled characteristic needs >= 5 matching samples");
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!(t[i] > 0) || t[i] > 1.0) throw DomainError("sampled characteristic abscissae must lie in (0, 1]");
        if (i > 0 && !(t[i] > t[i - 1])) throw DomainError("sampled characteristic abscissae must increase");
        if (!std::isfinite(r[i])) throw DomainError("sampled characteristic has non-finite values");
    }
    if (std::abs(t.back() - 1.0) > 1e-12) throw DomainError("sampled characteristic must extend to t = 1");
    CuspCharacteristic R;
    R.kind_ = CharacteristicKind::sampled;
    R.log_t_.resize(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) R.log_t_[i] = std::log(t[i]);
    R.r_ = std::move(r);
    return R;
}

std::string CuspCharacteristic::label() const {
    std::ostringstream os;
    switch (kind_) {
        case CharacteristicKind::power: os << "power(" << alpha_ << ")"; break;
        case CharacteristicKind::exponential: os << "exp(" << alpha_ << "," << beta_ << ")"; break;
        case CharacteristicKind::sampled: os << "sampled(" << r_.size() << ")"; break;
    }
    return os.str();
}

double CuspCharacteristic::domain_min() const {
    return kind_ == CharacteristicKind::sampled ? std::exp(log_t_.front()) : 0.0;
}

std::array<double, 5> CuspCharacteristic::sampled_x_derivatives(double t) const {
    const double x = std::log(t);
    if (x < log_t_.front() - 1e-12 || x > 1e-12)
        throw DomainError("sampled characteristic evaluated outside its table");
    auto it = std::upper_bound(log_t_.begin(), log_t_.end(), x);
    long i = static_cast<long>(it - log_t_.begin()) - 3;
    i = std::clamp(i, 0L, static_cast<long>(log_t_.size()) - 5);
    const double xc = log_t_[static_cast<std::size_t>(i) + 2];
    std::array<std::array<double, 5>, 5> a{};
    std::array<double, 5> b{};
    for (int k = 0; k < 5; ++k) {
        const double y = log_t_[static_cast<std::size_t>(i + k)] - xc;
        double p = 1.0;
        for (int j = 0; j < 5; ++j, p *= y) a[k][j] = p;
        b[k] = r_[static_cast<std::size_t>(i + k)];
    }
    const auto coef = solve5(a, b);
    const double y = x - xc;
    std::array<double, 5> d{};
    for (int order = 0; order < 5; ++order) {
        double acc = 0.0;
        for (int j = 4; j >= order; --j) {
            double f = 1.0;
            for (int q = 0; q < order; ++q) f *= static_cast<double>(j - q);
            acc = acc * y + f * coef[static_cast<std::size_t>(j)];
        }
        d[static_cast<std::size_t>(order)] = acc;
    }
    return d;
}

double CuspCharacteristic::value(double t) const { return derivative(t, 0); }

double CuspCharacteristic::log_value(double t) const {
    switch (kind_) {
        case CharacteristicKind::power: return alpha_ * std::log(t);
        case CharacteristicKind::exponential: return alpha_ * (1.0 - std::pow(t, -beta_));
        case CharacteristicKind::sampled: return std::log(value(t));
    }
    return 0.0;
}

double CuspCharacteristic::derivative(double t, int order) const {
    if (order < 0 || order > 4) throw DomainError("characteristic derivative order must be in [0, 4]");
    if (!(t > 0)) throw DomainError("characteristic evaluated at t <= 0");
    switch (kind_) {
        case CharacteristicKind::power: {
            double c = 1.0;
            for (int q = 0; q < order; ++q) c *= alpha_ - q;
            return c == 0.0 ? 0.0 : c * std::pow(t, alpha_ - order);
        }
        case CharacteristicKind::exponential: {
            if (order == 0) return std::exp(log_value(t));
            const double R = value(t);
            if (R == 0.0) return 0.0;
            return scaled_derivative(t, order) / std::pow(R, order - 1);
        }
        case CharacteristicKind::sampled: {
            const auto d = sampled_x_derivatives(t);
            // t^n d^n/dt^n in terms of D = d/dx (Stirling numbers of the first kind).
            switch (order) {
                case 0: return d[0];
                case 1: return d[1] / t;
                case 2: return (d[2] - d[1]) / (t * t);
                case 3: return (d[3] - 3 * d[2] + 2 * d[1]) / (t * t * t);
                default: return (d[4] - 6 * d[3] + 11 * d[2] - 6 * d[1]) / (t * t * t * t);
            }
        }
    }
    return 0.0;
}

double CuspCharacteristic::scaled_derivative(double t, int j) const {
    if (j < 1 || j > 4) throw DomainError("scaled derivative order must be in [1, 4]");
    switch (kind_) {
        case CharacteristicKind::power: {
            double c = 1.0;
            for (int q = 0; q < j; ++q) c *= alpha_ - q;
            return c == 0.0 ? 0.0 : c * std::pow(t, alpha_ * j - j);
        }
        case CharacteristicKind::exponential: {
            // R^(j) = R P_j(L', L'', ...) with L = log R.
            const double a = alpha_, b = beta_;
            const double tb = std::pow(t, -b);
            const double L1 = a * b * tb / t;
            const double L2 = -a * b * (b + 1) * tb / (t * t);
            const double L3 = a * b * (b + 1) * (b + 2) * tb / (t * t * t);
            const double L4 = -a * b * (b + 1) * (b + 2) * (b + 3) * tb / (t * t * t * t);
            double P = 0.0;
            switch (j) {
                case 1: P = L1; break;
                case 2: P = L2 + L1 * L1; break;
                case 3: P = L3 + 3 * L1 * L2 + L1 * L1 * L1; break;
                default: P = L4 + 4 * L1 * L3 + 3 * L2 * L2 + 6 * L1 * L1 * L2 + L1 * L1 * L1 * L1; break;
            }
            if (P == 0.0) return 0.0;
            const double e = j * log_value(t) + std::log(std::abs(P));
            return std::copysign(std::exp(e), P);
        }
        case CharacteristicKind::sampled:
            return std::pow(value(t), j - 1) * derivative(t, j);
    }
    return 0.0;
}

double CuspCharacteristic::log_derivative(double t) const {
    switch (kind_) {
        case CharacteristicKind::power: return alpha_ / t;
        case CharacteristicKind::exponential: return alpha_ * beta_ * std::pow(t, -beta_) / t;
        case CharacteristicKind::sampled: return derivative(t, 1) / value(t);
    }
    return 0.0;
}

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
    if (!(lo > 0) || !(hi > lo) || n < 2) throw DomainError("log_grid needs 0 < lo < hi and n >= 2");
    std::vector<double> g(n);
    const double a = std::log(lo), b = std::log(hi);
    for (std::size_t i = 0; i < n; ++i)
        g[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
    g.front() = lo;
    g.back() = hi;
    return g;
}

std::vector<double> validate_characteristic(const CuspCharacteristic& R, int j_max,
                                            std::span<const double> grid) {
    if (j_max < 1 || j_max > 4) throw DomainError("j_max must be in [1, 4]");
    std::vector<double> c(static_cast<std::size_t>(j_max), 0.0);
    for (double t : grid) {
        for (int j = 1; j <= j_max; ++j) {
            const double v = R.scaled_derivative(t, j);
            if (!std::isfinite(v))
                throw DomainError("non-finite derivative sample at t = " + std::to_string(t));
            auto& slot = c[static_cast<std::size_t>(j - 1)];
            slot = std::max(slot, std::abs(v));
        }
    }
    return c;
}

namespace {

// Integral of dt / R over [a, b] in the variable x = log t.
double reciprocal_integral(const CuspCharacteristic& R, double a, double b) {
    if (!(b > a)) return 0.0;
    const double xa = std::log(a), xb = std::log(b);
    // The integrand peaks at the lower end; report overflow as divergence.
    if (xa - R.log_value(a) > kExpLimit) return std::numeric_limits<double>::infinity();
    auto f = [&R](double x) { return std::exp(x - R.log_value(std::exp(x))); };
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    double err = 0.0;
    double v = GK::integrate(f, xa, xb, 0, 0.0, &err);
    if (std::isfinite(v) && err <= 1e-13 * std::max(1.0, std::abs(v))) return v;
    double err_adaptive = 0.0;
    const double v_adaptive = GK::integrate(f, xa, xb, 15, 1e-13, &err_adaptive);
    // Deep bisection can inflate the estimate with rounding noise; keep the better one.
    if (!std::isfinite(v) || err_adaptive < err) {
        v = v_adaptive;
        err = err_adaptive;
    }
    if (!std::isfinite(v) || err > 1e-9 * std::max(1.0, std::abs(v)))
        throw NumericalError("arclength quadrature did not converge");
    return v;
}

}  // namespace

DivergenceCertificate certify_characteristic(const CuspCharacteristic& R) {
    const double lo = std::max(1e-8, R.domain_min());
    for (double t : log_grid(lo, 1.0, 2048)) {
        const double lv = R.log_value(t);
        if (!std::isfinite(lv) || lv > 1e-12)
            throw DomainError("characteristic must satisfy 0 < R <= 1 (t = " + std::to_string(t) + ")");
    }
    DivergenceCertificate cert;
    double prev = 0.0;
    for (int e = 2; e <= 8; ++e) {
        const double eps = std::pow(10.0, -e);
        if (eps < R.domain_min() * (1 - 1e-12))
            throw DomainError("sampled characteristic does not extend to t = 1e-8");
        const double v = reciprocal_integral(R, eps, 1.0);
        if (std::isfinite(v) && !(v > prev)) throw DomainError("partial integrals of dt/R do not grow");
        cert.eps.push_back(eps);
        cert.partial.push_back(v);
        prev = v;
    }
    if (!(cert.partial.back() > 10.0))
        throw DomainError("integral of dt/R does not diverge: partial integral " +
                          std::to_string(cert.partial.back()) + " at t = 1e-8");
    return cert;
}

CuspCharacteristic make_characteristic(const CharacteristicSpec& spec) {
    CuspCharacteristic R = spec.kind == CharacteristicKind::power         ? CuspCharacteristic::power(spec.alpha)
                           : spec.kind == CharacteristicKind::exponential ? CuspCharacteristic::exponential(spec.alpha, spec.beta)
                                                                          : CuspCharacteristic::sampled(spec.t, spec.r);
    certify_characteristic(R);
    validate_characteristic(R, 4, log_grid(std::max(1e-8, R.domain_min()), 1.0, 2048));
    return R;
}

ArclengthMap::ArclengthMap(CuspCharacteristic R) : R_(std::move(R)) {
    const double tmin = std::max(1e-300, R_.domain_min());
    t_.push_back(1.0);
    rho_.push_back(0.0);
    double t = 1.0;
    while (t_.size() < 4000) {
        const double next = std::max(t * 0.8, tmin);
        if (!(next < t)) break;
        const double piece = reciprocal_integral(R_, next, t);
        if (!std::isfinite(piece) || rho_.back() + piece > 1e8) break;
        t_.push_back(next);
        rho_.push_back(rho_.back() + piece);
        t = next;
    }
}

double ArclengthMap::integral(double a, double b) const { return reciprocal_integral(R_, a, b); }

double ArclengthMap::operator()(double t) const {
    if (!(t > 0) || t > 1.0 + 1e-14) throw DomainError("arclength map evaluated outside (0, 1]");
    if (t >= 1.0) return 0.0;
    // Anchors decrease; find k with t_[k] >= t > t_[k+1].
    auto it = std::lower_bound(t_.begin(), t_.end(), t, std::greater<double>());
    const std::size_t k = static_cast<std::size_t>(it - t_.begin()) - 1;
    return rho_[k] + integral(t, t_[k]);
}

double ArclengthMap::derivative(double t) const { return -1.0 / R_.value(t); }

double ArclengthMap::inverse(double s) const {
    if (!(s >= 0)) throw DomainError("inverse arclength needs s >= 0");
    if (s == 0.0) return 1.0;
    if (!(s < rho_.back())) throw DomainError("inverse arclength: s beyond the tabulated range");
    auto it = std::upper_bound(rho_.begin(), rho_.end(), s);
    const std::size_t k = static_cast<std::size_t>(it - rho_.begin()) - 1;
    const double hi = t_[k], lo = t_[k + 1];
    auto f = [&](double t) { return rho_[k] + integral(t, hi) - s; };
    std::uintmax_t iters = 200;
    auto tol = [](double a, double b) { return std::abs(b - a) <= 4e-16 * std::abs(a); };
    const double flo = f(lo), fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    const auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, iters);
    const double t = 0.5 * (r.first + r.second);
    if (std::abs(f(t)) > 1e-12 * std::max(1.0, s)) throw NumericalError("inverse arclength did not reach tolerance");
    return t;
}

}  // namespace cuspfs::cusp
