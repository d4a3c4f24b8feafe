#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "cuspfs/geometry/tensor.hpp"

namespace cuspfs::localization {

using geometry::GridPtr;
using geometry::TensorField;

/**
 * One chart of a box atlas: the translation x -> x - center restricted to the open
 * unit box |x_i - center_i| < 1. Its grid holds the global nodes inside the box in
 * local coordinates.
 */
struct Chart {
    std::array<double, 2> center{};
    GridPtr local;
    std::vector<std::size_t> global_nodes;  ///< global index of each local node
};

/// Axis-aligned atlas of translated unit boxes on a cylinder grid.
struct UrAtlas {
    GridPtr grid;
    double overlap = 0.5;
    std::vector<Chart> charts;
    std::array<std::size_t, 2> per_axis{1, 1};
    int multiplicity = 0;  ///< largest number of charts containing one node
};

/**
 * Atlas whose r-shrunk boxes cover the grid, with r = overlap.
 *
 * Each non-periodic axis of length L gets ceil(L / 2r) equally spaced centers, a
 * periodic axis ceil(period / 2r).
 */
UrAtlas build_cylinder_atlas(const GridPtr& grid, double overlap);

/// Atlas with explicitly chosen centers per axis.
UrAtlas build_box_atlas(const GridPtr& grid, const std::vector<std::vector<double>>& centers,
                        double overlap);

/// Bumps pi_k with sum of squares one, and the common cutoff chi, on each chart grid.
/// b_k = prod (1 - x_i^2)^4 on the open unit box.
struct LocalizationSystem {
    UrAtlas atlas;
    std::vector<std::vector<double>> pi;
    std::vector<std::vector<double>> chi;
};

LocalizationSystem build_localization(UrAtlas atlas);

/// v_k = pi_k u, pushed to chart k.
std::vector<TensorField> coretract(const LocalizationSystem& sys, const TensorField& u);

/// Sum over charts of pi_k chi v_k, pulled back to the global grid.
TensorField retract(const LocalizationSystem& sys, const std::vector<TensorField>& family);

struct LocalizedNorm {
    std::vector<double> chart_norms;
    double total = 0.0;
};

/// Flat W_q^k norm on a chart grid: sum over i <= k of || |d^i v| ||_{L_q}.
double flat_sobolev_norm(const TensorField& v, int k, double q);

/// (sum_k ||pi_k u||^q_{W_q^k(box)})^(1/q).
LocalizedNorm localized_norm(const LocalizationSystem& sys, const TensorField& u, int k, double q);

}  // namespace cuspfs::localization
