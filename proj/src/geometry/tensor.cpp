#include "cuspfs/geometry/tensor.hpp"

#include <cmath>
#include <string>

#include "cuspfs/error.hpp"

namespace cuspfs::geometry {

std::size_t int_pow(int base, int exp) {
    std::size_t r = 1;
    for (int i = 0; i < exp; ++i) r *= static_cast<std::size_t>(base);
    return r;
}

TensorField::TensorField(GridPtr grid, Valence valence)
    : grid_(std::move(grid)), valence_(valence) {
    if (!grid_) throw DomainError("tensor field needs a grid");
    if (valence.contra < 0 || valence.co < 0 || valence.rank() > kMaxRank)
        throw ValenceError("unsupported valence (" + std::to_string(valence.contra) + "," +
                           std::to_string(valence.co) + ")");
    ncomp_ = int_pow(grid_->dim(), valence.rank());
    data_.assign(ncomp_ * grid_->size(), 0.0);
}

TensorField TensorField::scalar(GridPtr grid, std::vector<double> values) {
    TensorField f(std::move(grid), {0, 0});
    if (values.size() != f.nodes()) throw DomainError("scalar values do not match grid size");
    f.data_ = std::move(values);
    return f;
}

TensorField TensorField::constant_scalar(GridPtr grid, double value) {
    TensorField f(std::move(grid), {0, 0});
    for (auto& v : f.data_) v = value;
    return f;
}

TensorField TensorField::from_function(
    GridPtr grid, Valence valence, const std::function<void(const Point&, std::span<double>)>& f) {
    TensorField out(std::move(grid), valence);
    for (std::size_t n = 0; n < out.nodes(); ++n) f(out.grid_->point(n), out.at(n));
    return out;
}

void require_same_grid(const TensorField& a, const TensorField& b, const char* op) {
    if (a.grid() != b.grid() && !a.grid()->same_shape(*b.grid()))
        throw DomainError(std::string(op) + ": fields live on different grids");
}

void require_scalar(const TensorField& a, const char* op) {
    if (a.valence().rank() != 0) throw ValenceError(std::string(op) + ": expected a scalar field");
}

TensorField& TensorField::operator+=(const TensorField& other) {
    require_same_grid(*this, other, "operator+=");
    if (!(valence_ == other.valence_)) throw ValenceError("operator+=: valence mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    return *this;
}

TensorField& TensorField::operator-=(const TensorField& other) {
    require_same_grid(*this, other, "operator-=");
    if (!(valence_ == other.valence_)) throw ValenceError("operator-=: valence mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
    return *this;
}

TensorField& TensorField::operator*=(double s) {
    for (auto& v : data_) v *= s;
    return *this;
}

TensorField TensorField::scaled_by(const TensorField& scalar) const {
    require_same_grid(*this, scalar, "scaled_by");
    require_scalar(scalar, "scaled_by");
    TensorField out = *this;
    for (std::size_t n = 0; n < nodes(); ++n) {
        const double s = scalar.value(n);
        for (auto& v : out.at(n)) v *= s;
    }
    return out;
}

double TensorField::max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
}

TensorField operator+(TensorField a, const TensorField& b) { return a += b; }
TensorField operator-(TensorField a, const TensorField& b) { return a -= b; }
TensorField operator*(double s, TensorField a) { return a *= s; }

std::size_t component_index(int dim, std::span<const int> slots) {
    std::size_t c = 0;
    for (int s : slots) c = c * static_cast<std::size_t>(dim) + static_cast<std::size_t>(s);
    return c;
}

void component_slots(int dim, std::size_t comp, std::span<int> slots) {
    for (std::size_t k = slots.size(); k-- > 0;) {
        slots[k] = static_cast<int>(comp % static_cast<std::size_t>(dim));
        comp /= static_cast<std::size_t>(dim);
    }
}

}  // namespace cuspfs::geometry
