#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "cuspfs/geometry/grid.hpp"

namespace cuspfs::geometry {

/// Largest total valence a field may carry. The third correction family needs 5 slots.
inline constexpr int kMaxRank = 6;

/// (contra, co): number of contravariant and covariant slots.
struct Valence {
    int contra = 0;
    int co = 0;
    int rank() const { return contra + co; }
    bool operator==(const Valence&) const = default;
};

std::size_t int_pow(int base, int exp);

/**
 * Per-node tensor components of a fixed valence.
 *
 * Components are stored node-major. Within a node, slots are ordered contravariant
 * first, then covariant, with slot 0 most significant.
 */
class TensorField {
public:
    TensorField() = default;
    TensorField(GridPtr grid, Valence valence);

    static TensorField scalar(GridPtr grid, std::vector<double> values);
    static TensorField constant_scalar(GridPtr grid, double value);
    /// Fill by evaluating `f(point, components)` at every node.
    static TensorField from_function(GridPtr grid, Valence valence,
                                     const std::function<void(const Point&, std::span<double>)>& f);

    const GridPtr& grid() const { return grid_; }
    Valence valence() const { return valence_; }
    int dim() const { return grid_->dim(); }
    std::size_t components() const { return ncomp_; }
    std::size_t nodes() const { return grid_->size(); }

    std::span<double> at(std::size_t node) { return {data_.data() + node * ncomp_, ncomp_}; }
    std::span<const double> at(std::size_t node) const {
        return {data_.data() + node * ncomp_, ncomp_};
    }
    double& operator()(std::size_t node, std::size_t comp) { return data_[node * ncomp_ + comp]; }
    double operator()(std::size_t node, std::size_t comp) const {
        return data_[node * ncomp_ + comp];
    }
    /// Value of a scalar field.
    double value(std::size_t node) const { return data_[node]; }

    std::vector<double>& raw() { return data_; }
    const std::vector<double>& raw() const { return data_; }

    TensorField& operator+=(const TensorField& other);
    TensorField& operator-=(const TensorField& other);
    TensorField& operator*=(double s);

    /// Pointwise product with a scalar field.
    TensorField scaled_by(const TensorField& scalar) const;

    double max_abs() const;

private:
    GridPtr grid_;
    Valence valence_{};
    std::size_t ncomp_ = 1;
    std::vector<double> data_;
};

TensorField operator+(TensorField a, const TensorField& b);
TensorField operator-(TensorField a, const TensorField& b);
TensorField operator*(double s, TensorField a);

/// Flat component index for a multi-index over all slots.
std::size_t component_index(int dim, std::span<const int> slots);
/// Inverse of component_index; fills `slots` (length = rank).
void component_slots(int dim, std::size_t comp, std::span<int> slots);

void require_same_grid(const TensorField& a, const TensorField& b, const char* op);
void require_scalar(const TensorField& a, const char* op);

}  // namespace cuspfs::geometry
