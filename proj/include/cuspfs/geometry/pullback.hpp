#pragma once

#include <array>
#include <functional>

#include "cuspfs/geometry/tensor.hpp"

namespace cuspfs::geometry {

/// Jacobian dF^a/dx^i stored as jac[a][i].
using Jacobian = std::array<std::array<double, 2>, 2>;

/// Smooth map between two chart grids with an analytic Jacobian.
struct ChartMap {
    GridPtr source;
    GridPtr target;
    std::function<Point(const Point&)> map;
    std::function<Jacobian(const Point&)> jacobian;
};

/// G : A -> B followed by F : B -> C.
ChartMap compose(const ChartMap& f, const ChartMap& g);

/**
 * Pull a field on F.target back to F.source.
 *
 * Components are interpolated with tensor-product cubic Lagrange polynomials, which
 * reproduce nodal values exactly at grid-coincident points.
 */
TensorField pullback(const ChartMap& f, const TensorField& a);

/// Cubic Lagrange interpolation of all components at an arbitrary point.
void interpolate(const TensorField& a, const Point& p, std::span<double> out);

}  // namespace cuspfs::geometry
