#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

namespace cuspfs::cusp {

enum class CharacteristicKind { power, exponential, sampled };

/**
 * Cusp characteristic R on (0, 1].
 *
 * Power: R = t^alpha. Exponential: R = exp(alpha (1 - t^-beta)). Sampled: a user table
 * interpolated by local quartic polynomials in log t.
 */
class CuspCharacteristic {
public:
    static CuspCharacteristic power(double alpha);
    static CuspCharacteristic exponential(double alpha, double beta);
    static CuspCharacteristic sampled(std::vector<double> t, std::vector<double> r);

    CharacteristicKind kind() const { return kind_; }
    double alpha() const { return alpha_; }
    double beta() const { return beta_; }
    std::string label() const;

    double value(double t) const;
    /// log R(t); finite even where R underflows.
    double log_value(double t) const;
    /// R^(order)(t) for order in [0, 4].
    double derivative(double t, int order) const;
    /// R^(j-1) R^(j), evaluated without overflow.
    double scaled_derivative(double t, int j) const;
    /// R'(t) / R(t).
    double log_derivative(double t) const;
    /// Smallest t at which the characteristic may be evaluated.
    double domain_min() const;

private:
    CharacteristicKind kind_ = CharacteristicKind::power;
    double alpha_ = 1.0;
    double beta_ = 1.0;
    std::vector<double> log_t_;
    std::vector<double> r_;

    // Derivatives in x = log t of the local interpolant, orders 0..4.
    std::array<double, 5> sampled_x_derivatives(double t) const;
};

/// Parameters for make_characteristic.
struct CharacteristicSpec {
    CharacteristicKind kind = CharacteristicKind::power;
    double alpha = 1.0;
    double beta = 1.0;
    std::vector<double> t;
    std::vector<double> r;
};

/// Partial integrals of dt/R over [eps, 1] for eps = 1e-2 ... 1e-8.
struct DivergenceCertificate {
    std::vector<double> eps;
    std::vector<double> partial;
};

/// Build, validate and certify a characteristic; throws DomainError when invalid.
CuspCharacteristic make_characteristic(const CharacteristicSpec& spec);

/// Certify 0 < R <= 1 and divergence of the integral of dt/R.
DivergenceCertificate certify_characteristic(const CuspCharacteristic& R);

/// c(j) = max over the grid of |R^(j-1) R^(j)|, for j = 1..j_max.
std::vector<double> validate_characteristic(const CuspCharacteristic& R, int j_max,
                                            std::span<const double> grid);

/// n points log-spaced in [lo, hi], endpoints included.
std::vector<double> log_grid(double lo, double hi, std::size_t n);

/**
 * Arclength map rho(t) = integral from t to 1 of dtau / R(tau).
 *
 * Anchors are tabulated once; evaluations integrate from the nearest anchor.
 */
class ArclengthMap {
public:
    explicit ArclengthMap(CuspCharacteristic R);

    double operator()(double t) const;
    /// d rho / dt = -1 / R(t).
    double derivative(double t) const;
    /// t with rho(t) = s, to an absolute tolerance of 1e-12 in s.
    double inverse(double s) const;
    /// Largest arclength reachable before the anchor table ends.
    double max_arclength() const { return rho_.back(); }
    const CuspCharacteristic& characteristic() const { return R_; }

private:
    CuspCharacteristic R_;
    std::vector<double> t_;    // decreasing anchors, t_[0] = 1
    std::vector<double> rho_;  // rho at anchors

    double integral(double a, double b) const;  // integral over [a, b] of dt / R
};

}  // namespace cuspfs::cusp
