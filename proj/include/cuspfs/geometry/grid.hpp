#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace cuspfs::geometry {

using Point = std::array<double, 2>;

/// One coordinate axis. Periodic axes store a uniform sample of one period.
struct Axis {
    std::vector<double> coords;
    bool periodic = false;
    double period = 0.0;

    static Axis uniform(double lo, double hi, std::size_t n);
    static Axis periodic_uniform(double lo, double period, std::size_t n);
    static Axis from_coords(std::vector<double> coords);
};

/// Three-point first-derivative stencil along one axis.
struct Stencil {
    std::array<std::size_t, 3> index{};
    std::array<double, 3> weight{};
};

/**
 * Tensor-product grid on a chart of dimension 1 or 2.
 *
 * Nodes are flattened row-major: node = i0 * n1 + i1.
 */
class ChartGrid {
public:
    explicit ChartGrid(std::vector<Axis> axes);

    int dim() const { return static_cast<int>(axes_.size()); }
    std::size_t size() const { return size_; }
    std::size_t extent(int axis) const { return axes_[axis].coords.size(); }
    const Axis& axis(int a) const { return axes_[a]; }

    std::size_t node(std::size_t i0, std::size_t i1 = 0) const {
        return dim() == 1 ? i0 : i0 * axes_[1].coords.size() + i1;
    }
    std::array<std::size_t, 2> unflatten(std::size_t node) const;
    Point point(std::size_t node) const;

    /// Product of per-axis trapezoid weights.
    double cell_weight(std::size_t node) const;
    std::span<const double> quadrature_weights(int axis) const { return weights_[axis]; }

    const Stencil& stencil(int axis, std::size_t i) const { return stencils_[axis][i]; }

    /// Stride between consecutive nodes along an axis.
    std::size_t stride(int axis) const { return dim() == 2 && axis == 0 ? extent(1) : 1; }

    bool same_shape(const ChartGrid& other) const;

private:
    std::vector<Axis> axes_;
    std::size_t size_ = 0;
    std::vector<std::vector<double>> weights_;
    std::vector<std::vector<Stencil>> stencils_;
};

using GridPtr = std::shared_ptr<const ChartGrid>;

GridPtr make_grid(std::vector<Axis> axes);

}  // namespace cuspfs::geometry
