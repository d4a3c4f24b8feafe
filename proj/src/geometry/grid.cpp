#include "cuspfs/geometry/grid.hpp"

#include <cmath>

#include "cuspfs/error.hpp"

namespace cuspfs::geometry {

Axis Axis::uniform(double lo, double hi, std::size_t n) {
    if (n < 3 || !(hi > lo)) throw DomainError("uniform axis needs n >= 3 and hi > lo");
    std::vector<double> c(n);
    for (std::size_t i = 0; i < n; ++i)
        c[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    c.back() = hi;
    return Axis{std::move(c), false, 0.0};
}

Axis Axis::periodic_uniform(double lo, double period, std::size_t n) {
    if (n < 3 || !(period > 0)) throw DomainError("periodic axis needs n >= 3 and period > 0");
    std::vector<double> c(n);
    for (std::size_t i = 0; i < n; ++i)
        c[i] = lo + period * static_cast<double>(i) / static_cast<double>(n);
    return Axis{std::move(c), true, period};
}

Axis Axis::from_coords(std::vector<double> coords) {
    return Axis{std::move(coords), false, 0.0};
}

namespace {

std::vector<Stencil> build_stencils(const Axis& ax) {
    const auto& x = ax.coords;
    const std::size_t n = x.size();
    std::vector<Stencil> out(n);
    if (ax.periodic) {
        const double h = ax.period / static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) {
            out[i].index = {(i + n - 1) % n, i, (i + 1) % n};
            out[i].weight = {-0.5 / h, 0.0, 0.5 / h};
        }
        return out;
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double h1 = x[i] - x[i - 1];
        const double h2 = x[i + 1] - x[i];
        out[i].index = {i - 1, i, i + 1};
        out[i].weight = {-h2 / (h1 * (h1 + h2)), (h2 - h1) / (h1 * h2), h1 / (h2 * (h1 + h2))};
    }
    {
        const double h1 = x[1] - x[0];
        const double h2 = x[2] - x[1];
        out[0].index = {0, 1, 2};
        out[0].weight = {-(2 * h1 + h2) / (h1 * (h1 + h2)), (h1 + h2) / (h1 * h2),
                         -h1 / (h2 * (h1 + h2))};
    }
    {
        const double h1 = x[n - 2] - x[n - 3];
        const double h2 = x[n - 1] - x[n - 2];
        out[n - 1].index = {n - 3, n - 2, n - 1};
        out[n - 1].weight = {h2 / (h1 * (h1 + h2)), -(h1 + h2) / (h1 * h2),
                             (2 * h2 + h1) / (h2 * (h1 + h2))};
    }
    return out;
}

std::vector<double> build_weights(const Axis& ax) {
    const auto& x = ax.coords;
    const std::size_t n = x.size();
    std::vector<double> w(n);
    if (ax.periodic) {
        for (auto& v : w) v = ax.period / static_cast<double>(n);
        return w;
    }
    w[0] = 0.5 * (x[1] - x[0]);
    w[n - 1] = 0.5 * (x[n - 1] - x[n - 2]);
    for (std::size_t i = 1; i + 1 < n; ++i) w[i] = 0.5 * (x[i + 1] - x[i - 1]);
    return w;
}

}  // namespace

ChartGrid::ChartGrid(std::vector<Axis> axes) : axes_(std::move(axes)) {
    if (axes_.empty() || axes_.size() > 2) throw DomainError("chart grid dimension must be 1 or 2");
    size_ = 1;
    for (const auto& ax : axes_) {
        if (ax.coords.size() < 4) throw DomainError("each axis needs at least 4 nodes");
        for (std::size_t i = 1; i < ax.coords.size(); ++i)
            if (!(ax.coords[i] > ax.coords[i - 1]))
                throw DomainError("axis coordinates must be strictly increasing");
        if (ax.periodic && !(ax.period > ax.coords.back() - ax.coords.front()))
            throw DomainError("periodic axis period too small");
        size_ *= ax.coords.size();
        weights_.push_back(build_weights(ax));
        stencils_.push_back(build_stencils(ax));
    }
}

std::array<std::size_t, 2> ChartGrid::unflatten(std::size_t node) const {
    if (dim() == 1) return {node, 0};
    const std::size_t n1 = axes_[1].coords.size();
    return {node / n1, node % n1};
}

Point ChartGrid::point(std::size_t node) const {
    const auto ij = unflatten(node);
    Point p{axes_[0].coords[ij[0]], 0.0};
    if (dim() == 2) p[1] = axes_[1].coords[ij[1]];
    return p;
}

double ChartGrid::cell_weight(std::size_t node) const {
    const auto ij = unflatten(node);
    double w = weights_[0][ij[0]];
    if (dim() == 2) w *= weights_[1][ij[1]];
    return w;
}

bool ChartGrid::same_shape(const ChartGrid& other) const {
    if (dim() != other.dim()) return false;
    for (int a = 0; a < dim(); ++a)
        if (extent(a) != other.extent(a)) return false;
    return true;
}

GridPtr make_grid(std::vector<Axis> axes) {
    return std::make_shared<const ChartGrid>(std::move(axes));
}

}  // namespace cuspfs::geometry
