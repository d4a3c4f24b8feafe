#include "cuspfs/localization/atlas.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cuspfs/error.hpp"
#include "cuspfs/geometry/calculus.hpp"

namespace cuspfs::localization {

using geometry::Axis;
using geometry::ChartGrid;

namespace {

double local_coordinate(const Axis& ax, double x, double center) {
    double d = x - center;
    if (ax.periodic) {
        d = std::fmod(d, ax.period);
        if (d < -0.5 * ax.period) d += ax.period;
        if (d >= 0.5 * ax.period) d -= ax.period;
    }
    return d;
}

// Indices of axis nodes inside the open unit box around `center`, ordered by local coordinate.
std::vector<std::pair<double, std::size_t>> box_slice(const Axis& ax, double center) {
    std::vector<std::pair<double, std::size_t>> out;
    for (std::size_t i = 0; i < ax.coords.size(); ++i) {
        const double x = local_coordinate(ax, ax.coords[i], center);
        if (std::abs(x) < 1.0) out.emplace_back(x, i);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<double> lattice_centers(const Axis& ax, double overlap) {
    const double length = ax.periodic ? ax.period : ax.coords.back() - ax.coords.front();
    const auto n = static_cast<std::size_t>(std::ceil(length / (2.0 * overlap) - 1e-12));
    const double d = length / static_cast<double>(n);
    std::vector<double> c(n);
    for (std::size_t j = 0; j < n; ++j) c[j] = ax.coords.front() + d * (static_cast<double>(j) + 0.5);
    return c;
}

double bump_1d(double x) {
    if (std::abs(x) >= 1.0) return 0.0;
    const double w = 1.0 - x * x;
    return w * w * w * w;
}

}  // namespace

UrAtlas build_box_atlas(const GridPtr& grid, const std::vector<std::vector<double>>& centers,
                        double overlap) {
    const int m = grid->dim();
    if (static_cast<int>(centers.size()) != m) throw DomainError("one center list per axis required");
    if (!(overlap > 0.0) || !(overlap < 1.0)) throw DomainError("degenerate overlap: need 0 < r < 1");
    UrAtlas atlas;
    atlas.grid = grid;
    atlas.overlap = overlap;
    std::vector<std::vector<std::vector<std::pair<double, std::size_t>>>> slices(m);
    for (int a = 0; a < m; ++a) {
        if (centers[a].empty()) throw DomainError("empty center list");
        atlas.per_axis[a] = centers[a].size();
        for (double c : centers[a]) {
            auto s = box_slice(grid->axis(a), c);
            if (s.size() < 4) throw DomainError("chart box holds fewer than 4 grid nodes; refine the grid");
            slices[a].push_back(std::move(s));
        }
    }
    const std::size_t n1 = m == 2 ? centers[1].size() : 1;
    for (std::size_t j0 = 0; j0 < centers[0].size(); ++j0) {
        for (std::size_t j1 = 0; j1 < n1; ++j1) {
            Chart chart;
            chart.center = {centers[0][j0], m == 2 ? centers[1][j1] : 0.0};
            const auto& s0 = slices[0][j0];
            std::vector<Axis> axes;
            std::vector<double> x0;
            for (const auto& [x, i] : s0) x0.push_back(x);
            axes.push_back(Axis::from_coords(std::move(x0)));
            if (m == 2) {
                std::vector<double> x1;
                for (const auto& [x, i] : slices[1][j1]) x1.push_back(x);
                axes.push_back(Axis::from_coords(std::move(x1)));
                for (const auto& [x, i0] : s0)
                    for (const auto& [y, i1] : slices[1][j1]) chart.global_nodes.push_back(grid->node(i0, i1));
            } else {
                for (const auto& [x, i0] : s0) chart.global_nodes.push_back(i0);
            }
            chart.local = geometry::make_grid(std::move(axes));
            atlas.charts.push_back(std::move(chart));
        }
    }
    std::vector<int> count(grid->size(), 0);
    for (const auto& c : atlas.charts)
        for (std::size_t g : c.global_nodes) ++count[g];
    atlas.multiplicity = *std::max_element(count.begin(), count.end());
    return atlas;
}

UrAtlas build_cylinder_atlas(const GridPtr& grid, double overlap) {
    if (!(overlap > 0.3) || !(overlap < 0.9)) throw DomainError("degenerate overlap: need 0.3 < r < 0.9");
    const auto& s = grid->axis(0).coords;
    if (!(s.back() - s.front() > 2.0)) throw DomainError("cylinder length must exceed 2");
    std::vector<std::vector<double>> centers;
    for (int a = 0; a < grid->dim(); ++a) centers.push_back(lattice_centers(grid->axis(a), overlap));
    return build_box_atlas(grid, centers, overlap);
}

LocalizationSystem build_localization(UrAtlas atlas) {
    const auto& grid = *atlas.grid;
    LocalizationSystem sys;
    std::vector<double> sum_sq(grid.size(), 0.0);
    std::vector<std::vector<double>> bumps;
    for (const auto& c : atlas.charts) {
        std::vector<double> b(c.global_nodes.size());
        std::vector<double> chi(c.global_nodes.size());
        for (std::size_t j = 0; j < b.size(); ++j) {
            const auto p = c.local->point(j);
            double v = bump_1d(p[0]);
            if (grid.dim() == 2) v *= bump_1d(p[1]);
            b[j] = v;
            // supp b is the whole open box, so the cutoff is one on every chart node.
            chi[j] = 1.0;
            sum_sq[c.global_nodes[j]] += v * v;
        }
        bumps.push_back(std::move(b));
        sys.chi.push_back(std::move(chi));
    }
    for (std::size_t n = 0; n < sum_sq.size(); ++n)
        if (!(sum_sq[n] > 0.0)) throw DomainError("node " + std::to_string(n) + " is not covered by any shrunk chart");
    for (std::size_t k = 0; k < atlas.charts.size(); ++k) {
        auto& b = bumps[k];
        const auto& nodes = atlas.charts[k].global_nodes;
        for (std::size_t j = 0; j < b.size(); ++j) b[j] /= std::sqrt(sum_sq[nodes[j]]);
    }
    sys.pi = std::move(bumps);
    sys.atlas = std::move(atlas);
    return sys;
}

std::vector<TensorField> coretract(const LocalizationSystem& sys, const TensorField& u) {
    geometry::require_scalar(u, "coretract");
    if (u.grid() != sys.atlas.grid && !u.grid()->same_shape(*sys.atlas.grid))
        throw DomainError("coretract: field does not live on the atlas grid");
    std::vector<TensorField> out;
    out.reserve(sys.atlas.charts.size());
    for (std::size_t k = 0; k < sys.atlas.charts.size(); ++k) {
        const auto& c = sys.atlas.charts[k];
        std::vector<double> v(c.global_nodes.size());
        for (std::size_t j = 0; j < v.size(); ++j) v[j] = sys.pi[k][j] * u.value(c.global_nodes[j]);
        out.push_back(TensorField::scalar(c.local, std::move(v)));
    }
    return out;
}

TensorField retract(const LocalizationSystem& sys, const std::vector<TensorField>& family) {
    const auto& charts = sys.atlas.charts;
    if (family.size() != charts.size()) throw DomainError("retract: family size differs from chart count");
    TensorField u(sys.atlas.grid, {0, 0});
    for (std::size_t k = 0; k < charts.size(); ++k) {
        const auto& c = charts[k];
        if (family[k].nodes() != c.global_nodes.size() || family[k].valence().rank() != 0)
            throw DomainError("retract: family member does not match its chart");
        for (std::size_t j = 0; j < c.global_nodes.size(); ++j)
            u(c.global_nodes[j], 0) += sys.pi[k][j] * sys.chi[k][j] * family[k].value(j);
    }
    return u;
}

double flat_sobolev_norm(const TensorField& v, int k, double q) {
    if (k < 0 || k > 3) throw DomainError("flat Sobolev order must be in [0, 3]");
    geometry::Connection conn(geometry::flat_metric(v.grid()));
    const auto derivs = conn.iterated(v, k);
    double total = 0.0;
    for (const auto& d : derivs) total += geometry::lq_norm(geometry::bundle_norm(d, conn.metric()), conn.metric(), q);
    return total;
}

LocalizedNorm localized_norm(const LocalizationSystem& sys, const TensorField& u, int k, double q) {
    if (!(q >= 1.0)) throw DomainError("localized_norm: q must be >= 1");
    LocalizedNorm out;
    double acc = 0.0;
    for (const auto& v : coretract(sys, u)) {
        const double n = flat_sobolev_norm(v, k, q);
        out.chart_norms.push_back(n);
        acc += std::pow(n, q);
    }
    out.total = std::pow(acc, 1.0 / q);
    return out;
}

}  // namespace cuspfs::localization
