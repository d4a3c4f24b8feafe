#include "cuspfs/weighted/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "cuspfs/error.hpp"

namespace cuspfs::weighted {

std::string CorpusFunction::label() const {
    std::ostringstream os;
    os << "f" << id << "(mu=" << mu << ")";
    return os.str();
}

double CorpusFunction::shape(double s, double theta) const {
    return 1.0 + c1 * std::cos(w1 * s + p1) + c2 * std::cos(n2 * theta + p2) +
           c3 * std::sin(w3 * s + p3) * std::cos(n3 * theta + p4);
}

Corpus make_corpus(std::uint64_t seed, std::size_t count, double cutoff_fraction) {
    if (!(cutoff_fraction > 0.0) || cutoff_fraction > 1.0) throw DomainError("corpus cutoff fraction must lie in (0, 1]");
    static constexpr double kMu[3] = {0.5, 1.0, 2.0};
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> amp(-0.3, 0.3), freq(0.5, 2.0), phase(0.0, 2 * std::numbers::pi);
    std::uniform_int_distribution<int> mode(1, 3);
    Corpus corpus;
    corpus.seed = seed;
    corpus.cutoff_fraction = cutoff_fraction;
    for (std::size_t i = 0; i < count; ++i) {
        CorpusFunction f;
        f.id = static_cast<int>(i);
        f.mu = kMu[i % 3];
        f.c1 = amp(rng);
        f.w1 = freq(rng);
        f.p1 = phase(rng);
        f.c2 = amp(rng);
        f.n2 = mode(rng);
        f.p2 = phase(rng);
        f.c3 = amp(rng);
        f.w3 = freq(rng);
        f.p3 = phase(rng);
        f.n3 = mode(rng);
        f.p4 = phase(rng);
        corpus.functions.push_back(f);
    }
    return corpus;
}

void require_corpus(const Corpus& corpus, std::size_t minimum) {
    if (corpus.size() < minimum)
        throw DomainError("corpus too small: " + std::to_string(corpus.size()) + " < " + std::to_string(minimum));
}

namespace {

struct CutoffWindow {
    double lo = 0.0;
    double length = 1.0;

    double operator()(double s) const {
        const double x = (s - lo) / length;
        if (x >= 1.0) return 0.0;
        const double w = 1.0 - x * x;
        return w * w * w * w * w * w;
    }
};

CutoffWindow cutoff_window(const Corpus& corpus, const CuspDiscretization& d) {
    const auto& sv = d.mesh().s;
    const auto [lo, hi] = std::minmax_element(sv.begin(), sv.end());
    return {*lo, corpus.cutoff_fraction * (*hi - *lo)};
}

}  // namespace

double corpus_cutoff(const Corpus& corpus, const CuspDiscretization& d, double s) {
    return cutoff_window(corpus, d)(s);
}

geometry::TensorField evaluate(const Corpus& corpus, std::size_t index, const CuspDiscretization& d) {
    if (index >= corpus.size()) throw DomainError("corpus index out of range");
    const auto& f = corpus.functions[index];
    const CutoffWindow chi = cutoff_window(corpus, d);
    geometry::TensorField u(d.grid(), {0, 0});
    for (std::size_t n = 0; n < u.nodes(); ++n) {
        const double s = d.s(n);
        const double theta = d.dim() == 2 ? d.grid()->point(n)[1] : 0.0;
        u(n, 0) = std::pow(d.rho().value(n), f.mu) * f.shape(s, theta) * chi(s);
    }
    return u;
}

}  // namespace cuspfs::weighted
