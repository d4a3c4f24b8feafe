#pragma once

#include <vector>

#include "cuspfs/geometry/tensor.hpp"

namespace cuspfs::geometry {

/// Riemannian metric sampled on a grid, with cached inverse and volume density.
class MetricField {
public:
    /// Validates symmetry and positive definiteness at every node.
    explicit MetricField(TensorField g);

    const GridPtr& grid() const { return g_.grid(); }
    int dim() const { return g_.dim(); }
    const TensorField& covariant() const { return g_; }
    const TensorField& inverse() const { return ginv_; }
    double sqrt_det(std::size_t node) const { return sqrt_det_[node]; }

private:
    TensorField g_;
    TensorField ginv_;
    std::vector<double> sqrt_det_;
};

/// Metric from a pointwise evaluator returning g_ij in row-major order.
MetricField metric_from_function(GridPtr grid,
                                 const std::function<void(const Point&, std::span<double>)>& f);

/// Euclidean metric in the grid's coordinates.
MetricField flat_metric(GridPtr grid);

/// g / rho^2.
MetricField conformal_rescale(const MetricField& g, const TensorField& rho);

/**
 * Generalized eigenvalues of g2 relative to g1, reduced over all nodes.
 *
 * Returns {smallest, largest}.
 */
std::pair<double, double> metric_equivalence_ratio(const MetricField& g1, const MetricField& g2);

}  // namespace cuspfs::geometry
