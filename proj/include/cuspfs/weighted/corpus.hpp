#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cuspfs/weighted/discretization.hpp"

namespace cuspfs::weighted {

/**
 * Test function u = rho^mu * phi(s, theta) * chi(s) in cylinder coordinates.
 *
 * phi = 1 + c1 cos(w1 s + p1) + c2 cos(n2 theta + p2) + c3 sin(w3 s + p3) cos(n3 theta + p4),
 * chi(s) = (1 - ((s - s0)/L)^2)^6 on s - s0 < L, zero beyond.
 */
struct CorpusFunction {
    int id = 0;
    double mu = 1.0;
    double c1 = 0, w1 = 1, p1 = 0;
    double c2 = 0, p2 = 0;
    int n2 = 1;
    double c3 = 0, w3 = 1, p3 = 0, p4 = 0;
    int n3 = 1;

    std::string label() const;
    /// phi(s, theta).
    double shape(double s, double theta) const;
};

struct Corpus {
    std::uint64_t seed = 0;
    double cutoff_fraction = 0.75;
    std::vector<CorpusFunction> functions;

    std::size_t size() const { return functions.size(); }
};

/// Seeded corpus; decay exponents cycle through {0.5, 1, 2}.
Corpus make_corpus(std::uint64_t seed, std::size_t count = 12, double cutoff_fraction = 0.75);

/// Reject corpora with fewer than `minimum` functions.
void require_corpus(const Corpus& corpus, std::size_t minimum = 12);

/// Cutoff chi of the corpus on a discretization.
double corpus_cutoff(const Corpus& corpus, const CuspDiscretization& d, double s);

/// Sample u on the discretization's nodes.
geometry::TensorField evaluate(const Corpus& corpus, std::size_t index, const CuspDiscretization& d);

}  // namespace cuspfs::weighted
