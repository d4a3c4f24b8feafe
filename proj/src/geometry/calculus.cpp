#include "cuspfs/geometry/calculus.hpp"

#include <array>
#include <cmath>
#include <string>

#include "cuspfs/error.hpp"

namespace cuspfs::geometry {

namespace {

using Slots = std::array<int, kMaxRank + 1>;

// Stride of slot s within a component index of the given rank.
std::size_t slot_stride(int m, int rank, int s) { return int_pow(m, rank - 1 - s); }

// out[c] = sum_p M[slot_s(c)][p] * in[c with slot s -> p], M row-major m x m.
void apply_to_slot(std::span<const double> in, std::span<double> out, int m, int rank, int s,
                   std::span<const double> mat) {
    const std::size_t st = slot_stride(m, rank, s);
    for (std::size_t c = 0; c < in.size(); ++c) {
        const int v = static_cast<int>((c / st) % static_cast<std::size_t>(m));
        const std::size_t base = c - static_cast<std::size_t>(v) * st;
        double acc = 0.0;
        for (int p = 0; p < m; ++p) acc += mat[v * m + p] * in[base + static_cast<std::size_t>(p) * st];
        out[c] = acc;
    }
}

}  // namespace

TensorField partial(const TensorField& a, int axis) {
    const auto& grid = *a.grid();
    if (axis < 0 || axis >= grid.dim()) throw DomainError("partial: axis out of range");
    TensorField out(a.grid(), a.valence());
    const std::size_t nc = a.components();
    const std::size_t stride = grid.stride(axis);
    for (std::size_t n = 0; n < a.nodes(); ++n) {
        const std::size_t i = grid.unflatten(n)[axis];
        const std::size_t base = n - i * stride;
        const Stencil& st = grid.stencil(axis, i);
        auto o = out.at(n);
        for (int k = 0; k < 3; ++k) {
            const double w = st.weight[k];
            if (w == 0.0) continue;
            auto src = a.at(base + st.index[k] * stride);
            for (std::size_t c = 0; c < nc; ++c) o[c] += w * src[c];
        }
    }
    return out;
}

TensorField coordinate_derivative(const TensorField& a) {
    const int m = a.dim();
    Valence v = a.valence();
    TensorField out(a.grid(), {v.contra, v.co + 1});
    const std::size_t nc = a.components();
    for (int l = 0; l < m; ++l) {
        TensorField d = partial(a, l);
        for (std::size_t n = 0; n < a.nodes(); ++n) {
            auto src = d.at(n);
            auto dst = out.at(n);
            for (std::size_t c = 0; c < nc; ++c) dst[c * m + l] = src[c];
        }
    }
    return out;
}

TensorField christoffel(const MetricField& g) {
    const int m = g.dim();
    TensorField dg = coordinate_derivative(g.covariant());  // dg_{ab,c} = d_c g_ab
    TensorField gamma(g.grid(), {1, 2});
    for (std::size_t n = 0; n < gamma.nodes(); ++n) {
        auto d = dg.at(n);
        auto inv = g.inverse().at(n);
        auto out = gamma.at(n);
        auto D = [&](int a, int b, int c) { return d[(a * m + b) * m + c]; };
        for (int k = 0; k < m; ++k)
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < m; ++j) {
                    double acc = 0.0;
                    for (int l = 0; l < m; ++l)
                        acc += inv[k * m + l] * (D(j, l, i) + D(i, l, j) - D(i, j, l));
                    out[(k * m + i) * m + j] = 0.5 * acc;
                }
    }
    return gamma;
}

Connection::Connection(MetricField g) : g_(std::move(g)), gamma_(geometry::christoffel(g_)) {}

TensorField Connection::derivative(const TensorField& a) const {
    require_same_grid(a, gamma_, "covariant_derivative");
    const int m = a.dim();
    const Valence v = a.valence();
    if (v.rank() + 1 > kMaxRank) throw ValenceError("covariant_derivative: result valence too large");
    TensorField out = coordinate_derivative(a);
    const int rank = v.rank();
    const std::size_t nc = a.components();
    Slots slots{};
    for (std::size_t n = 0; n < a.nodes(); ++n) {
        auto src = a.at(n);
        auto G = gamma_.at(n);
        auto dst = out.at(n);
        for (std::size_t c = 0; c < nc; ++c) {
            component_slots(m, c, std::span<int>(slots.data(), static_cast<std::size_t>(rank)));
            for (int l = 0; l < m; ++l) {
                double acc = 0.0;
                for (int s = 0; s < rank; ++s) {
                    const std::size_t st = slot_stride(m, rank, s);
                    const std::size_t base = c - static_cast<std::size_t>(slots[s]) * st;
                    if (s < v.contra) {
                        for (int p = 0; p < m; ++p)
                            acc += G[(slots[s] * m + l) * m + p] * src[base + static_cast<std::size_t>(p) * st];
                    } else {
                        for (int p = 0; p < m; ++p)
                            acc -= G[(p * m + l) * m + slots[s]] * src[base + static_cast<std::size_t>(p) * st];
                    }
                }
                dst[c * m + l] += acc;
            }
        }
    }
    return out;
}

std::vector<TensorField> Connection::iterated(const TensorField& u, int k) const {
    std::vector<TensorField> out;
    out.reserve(static_cast<std::size_t>(k) + 1);
    out.push_back(u);
    for (int i = 0; i < k; ++i) out.push_back(derivative(out.back()));
    return out;
}

TensorField covariant_derivative(const TensorField& a, const MetricField& g) {
    return Connection(g).derivative(a);
}

TensorField contract(const TensorField& a, int s, int t) {
    const Valence v = a.valence();
    if (s < 1 || s > v.contra || t < 1 || t > v.co)
        throw ValenceError("contract: slot indices out of range");
    const int m = a.dim();
    const int rank = v.rank();
    const int cs = s - 1;
    const int ct = v.contra + t - 1;
    TensorField out(a.grid(), {v.contra - 1, v.co - 1});
    const std::size_t sts = slot_stride(m, rank, cs);
    const std::size_t stt = slot_stride(m, rank, ct);
    Slots rs{};
    Slots full{};
    for (std::size_t rc = 0; rc < out.components(); ++rc) {
        component_slots(m, rc, std::span<int>(rs.data(), static_cast<std::size_t>(rank - 2)));
        int k = 0;
        for (int q = 0; q < rank; ++q) full[q] = (q == cs || q == ct) ? 0 : rs[k++];
        const std::size_t base = component_index(m, std::span<const int>(full.data(), static_cast<std::size_t>(rank)));
        for (std::size_t n = 0; n < a.nodes(); ++n) {
            auto src = a.at(n);
            double acc = 0.0;
            for (int p = 0; p < m; ++p) acc += src[base + static_cast<std::size_t>(p) * (sts + stt)];
            out(n, rc) = acc;
        }
    }
    return out;
}

TensorField complete_contraction(const TensorField& a, const TensorField& b) {
    require_same_grid(a, b, "complete_contraction");
    const Valence va = a.valence();
    const Valence vb = b.valence();
    if (vb.co > va.contra) throw ValenceError("complete_contraction: b has more covariant slots than a has contravariant");
    if (vb.rank() == 0) return a.scaled_by(b);
    const int m = a.dim();
    TensorField out(a.grid(), {va.contra - vb.co + vb.contra, va.co});
    const std::size_t nI = int_pow(m, va.contra - vb.co);
    const std::size_t nK = int_pow(m, vb.co);
    const std::size_t nJ = int_pow(m, va.co);
    const std::size_t nP = int_pow(m, vb.contra);
    for (std::size_t n = 0; n < a.nodes(); ++n) {
        auto A = a.at(n);
        auto B = b.at(n);
        auto R = out.at(n);
        for (std::size_t I = 0; I < nI; ++I)
            for (std::size_t P = 0; P < nP; ++P)
                for (std::size_t J = 0; J < nJ; ++J) {
                    double acc = 0.0;
                    for (std::size_t K = 0; K < nK; ++K) acc += A[(I * nK + K) * nJ + J] * B[P * nK + K];
                    R[(I * nP + P) * nJ + J] = acc;
                }
    }
    return out;
}

TensorField tensor_product(const TensorField& a, const TensorField& b) {
    require_same_grid(a, b, "tensor_product");
    const Valence va = a.valence();
    const Valence vb = b.valence();
    const int m = a.dim();
    TensorField out(a.grid(), {va.contra + vb.contra, va.co + vb.co});
    const std::size_t nIa = int_pow(m, va.contra), nJa = int_pow(m, va.co);
    const std::size_t nIb = int_pow(m, vb.contra), nJb = int_pow(m, vb.co);
    for (std::size_t n = 0; n < a.nodes(); ++n) {
        auto A = a.at(n);
        auto B = b.at(n);
        auto R = out.at(n);
        for (std::size_t Ia = 0; Ia < nIa; ++Ia)
            for (std::size_t Ib = 0; Ib < nIb; ++Ib)
                for (std::size_t Ja = 0; Ja < nJa; ++Ja)
                    for (std::size_t Jb = 0; Jb < nJb; ++Jb)
                        R[((Ia * nIb + Ib) * nJa + Ja) * nJb + Jb] = A[Ia * nJa + Ja] * B[Ib * nJb + Jb];
    }
    return out;
}

TensorField transpose_covariant(const TensorField& a, int i, int j) {
    const Valence v = a.valence();
    if (i < 0 || j < 0 || i >= v.co || j >= v.co) throw ValenceError("transpose_covariant: slot out of range");
    const int m = a.dim();
    const int rank = v.rank();
    TensorField out(a.grid(), v);
    Slots sl{};
    for (std::size_t c = 0; c < a.components(); ++c) {
        component_slots(m, c, std::span<int>(sl.data(), static_cast<std::size_t>(rank)));
        std::swap(sl[v.contra + i], sl[v.contra + j]);
        const std::size_t dst = component_index(m, std::span<const int>(sl.data(), static_cast<std::size_t>(rank)));
        for (std::size_t n = 0; n < a.nodes(); ++n) out(n, dst) = a(n, c);
    }
    return out;
}

TensorField identity_tensor(const GridPtr& grid) {
    const int m = grid->dim();
    return TensorField::from_function(grid, {1, 1}, [m](const Point&, std::span<double> c) {
        for (int i = 0; i < m; ++i) c[i * m + i] = 1.0;
    });
}

TensorField lower_all(const TensorField& a, const MetricField& g) {
    require_same_grid(a, g.covariant(), "lower_all");
    const Valence v = a.valence();
    const int m = a.dim();
    TensorField out = a;
    std::vector<double> tmp(a.components());
    for (std::size_t n = 0; n < a.nodes(); ++n) {
        auto cur = out.at(n);
        for (int s = 0; s < v.contra; ++s) {
            apply_to_slot(cur, tmp, m, v.rank(), s, g.covariant().at(n));
            std::copy(tmp.begin(), tmp.end(), cur.begin());
        }
    }
    return out;
}

TensorField raise_all(const TensorField& a, const MetricField& g) {
    require_same_grid(a, g.covariant(), "raise_all");
    const Valence v = a.valence();
    const int m = a.dim();
    TensorField out = a;
    std::vector<double> tmp(a.components());
    for (std::size_t n = 0; n < a.nodes(); ++n) {
        auto cur = out.at(n);
        for (int s = v.contra; s < v.rank(); ++s) {
            apply_to_slot(cur, tmp, m, v.rank(), s, g.inverse().at(n));
            std::copy(tmp.begin(), tmp.end(), cur.begin());
        }
    }
    return out;
}

TensorField bundle_norm(const TensorField& a, const MetricField& g) {
    require_same_grid(a, g.covariant(), "bundle_norm");
    const Valence v = a.valence();
    const int m = a.dim();
    TensorField out(a.grid(), {0, 0});
    std::vector<double> cur(a.components()), tmp(a.components());
    for (std::size_t n = 0; n < a.nodes(); ++n) {
        auto src = a.at(n);
        std::copy(src.begin(), src.end(), cur.begin());
        for (int s = 0; s < v.rank(); ++s) {
            auto mat = s < v.contra ? g.covariant().at(n) : g.inverse().at(n);
            apply_to_slot(cur, tmp, m, v.rank(), s, mat);
            std::swap(cur, tmp);
        }
        double acc = 0.0;
        for (std::size_t c = 0; c < cur.size(); ++c) acc += src[c] * cur[c];
        out(n, 0) = std::sqrt(std::max(0.0, acc));
    }
    return out;
}

double integrate(const TensorField& u, const MetricField& g, double q) {
    require_scalar(u, "integrate");
    require_same_grid(u, g.covariant(), "integrate");
    if (!(q >= 1)) throw DomainError("integrate: q must be >= 1");
    const auto& grid = *u.grid();
    double acc = 0.0;
    for (std::size_t n = 0; n < u.nodes(); ++n)
        acc += std::pow(std::abs(u.value(n)), q) * g.sqrt_det(n) * grid.cell_weight(n);
    return acc;
}

double integrate_signed(const TensorField& u, const MetricField& g) {
    require_scalar(u, "integrate_signed");
    require_same_grid(u, g.covariant(), "integrate_signed");
    const auto& grid = *u.grid();
    double acc = 0.0;
    for (std::size_t n = 0; n < u.nodes(); ++n) acc += u.value(n) * g.sqrt_det(n) * grid.cell_weight(n);
    return acc;
}

double lq_norm(const TensorField& u, const MetricField& g, double q) {
    return std::pow(integrate(u, g, q), 1.0 / q);
}

TensorField map_scalar(const TensorField& u, double (*f)(double)) {
    require_scalar(u, "map_scalar");
    TensorField out = u;
    for (auto& v : out.raw()) v = f(v);
    return out;
}

TensorField pow_scalar(const TensorField& u, double p) {
    require_scalar(u, "pow_scalar");
    TensorField out = u;
    for (auto& v : out.raw()) v = std::pow(v, p);
    return out;
}

TensorField laplace_beltrami(const TensorField& u, const Connection& conn) {
    require_scalar(u, "laplace_beltrami");
    TensorField hess = conn.derivative(conn.derivative(u));
    return complete_contraction(conn.metric().inverse(), hess);
}

TensorField laplace_beltrami_divergence(const TensorField& u, const MetricField& g) {
    require_scalar(u, "laplace_beltrami_divergence");
    const int m = g.dim();
    TensorField du = coordinate_derivative(u);
    TensorField out(u.grid(), {0, 0});
    for (int i = 0; i < m; ++i) {
        TensorField flux(u.grid(), {0, 0});
        for (std::size_t n = 0; n < u.nodes(); ++n) {
            auto inv = g.inverse().at(n);
            double acc = 0.0;
            for (int j = 0; j < m; ++j) acc += inv[i * m + j] * du(n, static_cast<std::size_t>(j));
            flux(n, 0) = g.sqrt_det(n) * acc;
        }
        out += partial(flux, i);
    }
    for (std::size_t n = 0; n < u.nodes(); ++n) out(n, 0) /= g.sqrt_det(n);
    return out;
}

}  // namespace cuspfs::geometry
