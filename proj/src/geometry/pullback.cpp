#include "cuspfs/geometry/pullback.hpp"

#include <algorithm>
#include <cmath>

#include "cuspfs/error.hpp"

namespace cuspfs::geometry {

namespace {

// Four nodes around x along one axis and their Lagrange weights.
struct AxisWeights {
    std::array<std::size_t, 4> index{};
    std::array<double, 4> weight{};
};

AxisWeights axis_weights(const Axis& ax, double x) {
    const auto& c = ax.coords;
    const std::size_t n = c.size();
    AxisWeights w;
    std::array<double, 4> xs{};
    if (ax.periodic) {
        const double h = ax.period / static_cast<double>(n);
        double r = std::fmod(x - c[0], ax.period);
        if (r < 0) r += ax.period;
        const auto i = static_cast<long>(std::floor(r / h));
        for (int k = 0; k < 4; ++k) {
            const long j = i - 1 + k;
            w.index[k] = static_cast<std::size_t>(((j % static_cast<long>(n)) + static_cast<long>(n)) % static_cast<long>(n));
            xs[k] = static_cast<double>(j) * h;
        }
        x = r;
    } else {
        const double tol = 1e-9 * (c.back() - c.front());
        if (x < c.front() - tol || x > c.back() + tol)
            throw DomainError("interpolate: point outside grid");
        auto it = std::upper_bound(c.begin(), c.end(), x);
        long i = static_cast<long>(it - c.begin()) - 1;
        i = std::clamp(i - 1, 0L, static_cast<long>(n) - 4);
        for (int k = 0; k < 4; ++k) {
            w.index[k] = static_cast<std::size_t>(i + k);
            xs[k] = c[w.index[k]];
        }
    }
    for (int k = 0; k < 4; ++k) {
        double l = 1.0;
        for (int j = 0; j < 4; ++j)
            if (j != k) l *= (x - xs[j]) / (xs[k] - xs[j]);
        w.weight[k] = l;
    }
    return w;
}

}  // namespace

void interpolate(const TensorField& a, const Point& p, std::span<double> out) {
    const auto& grid = *a.grid();
    const std::size_t nc = a.components();
    std::fill(out.begin(), out.end(), 0.0);
    const AxisWeights w0 = axis_weights(grid.axis(0), p[0]);
    if (grid.dim() == 1) {
        for (int k = 0; k < 4; ++k) {
            auto src = a.at(w0.index[k]);
            for (std::size_t c = 0; c < nc; ++c) out[c] += w0.weight[k] * src[c];
        }
        return;
    }
    const AxisWeights w1 = axis_weights(grid.axis(1), p[1]);
    for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 4; ++l) {
            const double w = w0.weight[k] * w1.weight[l];
            auto src = a.at(grid.node(w0.index[k], w1.index[l]));
            for (std::size_t c = 0; c < nc; ++c) out[c] += w * src[c];
        }
}

ChartMap compose(const ChartMap& f, const ChartMap& g) {
    if (g.target->dim() != f.source->dim()) throw DomainError("compose: dimension mismatch");
    const int m = g.source->dim();
    ChartMap out;
    out.source = g.source;
    out.target = f.target;
    out.map = [f, g](const Point& x) { return f.map(g.map(x)); };
    out.jacobian = [f, g, m](const Point& x) {
        const Jacobian jg = g.jacobian(x);
        const Jacobian jf = f.jacobian(g.map(x));
        Jacobian r{};
        for (int a = 0; a < m; ++a)
            for (int i = 0; i < m; ++i)
                for (int b = 0; b < m; ++b) r[a][i] += jf[a][b] * jg[b][i];
        return r;
    };
    return out;
}

TensorField pullback(const ChartMap& f, const TensorField& a) {
    if (a.grid() != f.target && !a.grid()->same_shape(*f.target))
        throw DomainError("pullback: field does not live on the map's target grid");
    const int m = f.source->dim();
    if (m != f.target->dim()) throw DomainError("pullback: map must be between equal dimensions");
    const Valence v = a.valence();
    const int rank = v.rank();
    TensorField out(f.source, v);
    std::vector<double> cur(a.components()), tmp(a.components());
    for (std::size_t n = 0; n < out.nodes(); ++n) {
        const Point x = f.source->point(n);
        const Jacobian J = f.jacobian(x);
        Jacobian Jinv{};
        if (m == 1) {
            if (J[0][0] == 0.0) throw DomainError("pullback: singular Jacobian");
            Jinv[0][0] = 1.0 / J[0][0];
        } else {
            const double det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
            if (det == 0.0) throw DomainError("pullback: singular Jacobian");
            Jinv = {{{J[1][1] / det, -J[0][1] / det}, {-J[1][0] / det, J[0][0] / det}}};
        }
        interpolate(a, f.map(x), cur);
        for (int s = 0; s < rank; ++s) {
            const std::size_t st = int_pow(m, rank - 1 - s);
            for (std::size_t c = 0; c < cur.size(); ++c) {
                const int i = static_cast<int>((c / st) % static_cast<std::size_t>(m));
                const std::size_t base = c - static_cast<std::size_t>(i) * st;
                double acc = 0.0;
                for (int p = 0; p < m; ++p) {
                    const double coef = s < v.contra ? Jinv[i][p] : J[p][i];
                    acc += coef * cur[base + static_cast<std::size_t>(p) * st];
                }
                tmp[c] = acc;
            }
            std::swap(cur, tmp);
        }
        std::copy(cur.begin(), cur.end(), out.at(n).begin());
    }
    return out;
}

}  // namespace cuspfs::geometry
