#pragma once

#include <vector>

#include "cuspfs/geometry/metric.hpp"
#include "cuspfs/geometry/tensor.hpp"

namespace cuspfs::geometry {

/// Partial derivative of every component along one axis.
TensorField partial(const TensorField& a, int axis);

/// Coordinate derivative, appended as a trailing covariant slot.
TensorField coordinate_derivative(const TensorField& a);

/// Gamma^k_ij stored as a (1,2) field with slots (k; i, j).
TensorField christoffel(const MetricField& g);

/// Levi-Civita connection with cached Christoffel symbols.
class Connection {
public:
    explicit Connection(MetricField g);

    const MetricField& metric() const { return g_; }
    const TensorField& christoffel() const { return gamma_; }

    /// Covariant derivative; the new covariant slot is appended last.
    TensorField derivative(const TensorField& a) const;

    /// {u, du, nabla du, ...} up to order k.
    std::vector<TensorField> iterated(const TensorField& u, int k) const;

private:
    MetricField g_;
    TensorField gamma_;
};

TensorField covariant_derivative(const TensorField& a, const MetricField& g);

/// Contract contravariant slot s with covariant slot t (both 1-based).
TensorField contract(const TensorField& a, int s, int t);

/**
 * Complete contraction a.b.
 *
 * The trailing contravariant slots of a are paired with all covariant slots of b.
 * Result slots: a's leading contravariant, then b's contravariant; a's covariant.
 * A scalar b multiplies a pointwise.
 */
TensorField complete_contraction(const TensorField& a, const TensorField& b);

TensorField tensor_product(const TensorField& a, const TensorField& b);

/// Swap covariant slots i and j (0-based among the covariant slots).
TensorField transpose_covariant(const TensorField& a, int i, int j);

/// Kronecker delta as a (1,1) field.
TensorField identity_tensor(const GridPtr& grid);

/// Pointwise norm induced by g on the bundle of the field's valence.
TensorField bundle_norm(const TensorField& a, const MetricField& g);

/// Lower every contravariant slot with g.
TensorField lower_all(const TensorField& a, const MetricField& g);
/// Raise every covariant slot with g*.
TensorField raise_all(const TensorField& a, const MetricField& g);

/// Integral of |u|^q against the Riemannian volume.
double integrate(const TensorField& u, const MetricField& g, double q);
/// Integral of u against the Riemannian volume.
double integrate_signed(const TensorField& u, const MetricField& g);
/// (integrate(u, g, q))^(1/q).
double lq_norm(const TensorField& u, const MetricField& g, double q);

/// Pointwise elementary maps on scalar fields.
TensorField map_scalar(const TensorField& u, double (*f)(double));
TensorField pow_scalar(const TensorField& u, double p);

/// Laplace-Beltrami operator as trace of the Hessian.
TensorField laplace_beltrami(const TensorField& u, const Connection& conn);
/// Laplace-Beltrami in divergence form, (1/sqrt g) d_i(sqrt g g^ij d_j u).
TensorField laplace_beltrami_divergence(const TensorField& u, const MetricField& g);

}  // namespace cuspfs::geometry
