#pragma once

// Small synthetic trains with known structure.

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "deint/hacot.hpp"
#include "deint/pdw.hpp"
#include "deint/transport.hpp"
#include "helpers.hpp"

namespace fixture {

// Two scanning emitters, each with two frequency modes picked pulse by pulse, so
// each emitter gives two leaves with the same TOA distribution. Emitter 1's lobes
// sit half a scan period after emitter 0's and its scan starts half-way through
// emitter 0's. Leaf id = 2 * emitter + mode.
struct FourLeaf {
    deint::PulseTrain train;
    deint::hacot::ClusterSet leaves;
};

inline FourLeaf four_leaf(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double scan = 20'000 + 20'000 * u(rng);
    const double width = scan * (0.15 + 0.1 * u(rng));
    const int lobes = 4 + static_cast<int>(rng() % 4);
    std::vector<deint::Pulse> pulses;
    std::vector<int> leaf;
    for (int e = 0; e < 2; ++e) {
        const double pri = 80 + 70 * u(rng);
        const double share = 0.3 + 0.4 * u(rng);
        const double offset = e * (lobes / 2 + 0.5) * scan + scan * 0.05 * u(rng);
        for (int k = 0; k < lobes; ++k) {
            const double c = offset + k * scan;
            for (double t = c - width / 2 + pri * u(rng); t < c + width / 2; t += pri) {
                const int mode = u(rng) < share ? 0 : 1;
                pulses.push_back({t, 900.0 + 100.0 * e + 30.0 * mode, 10.0 + e, 0.0});
                leaf.push_back(2 * e + mode);
            }
        }
    }
    deint::PulseTrain train(pulses, leaf);
    deint::hacot::ClusterSet cs;
    for (std::size_t i = 0; i < train.size(); ++i) cs.clusters[(*train.truth())[i]].push_back(i);
    return {train, cs};
}

// Random binary merge tree over `leaves` singleton leaves (leaf i holds pulse i).
inline deint::hacot::Dendrogram random_dendrogram(std::mt19937_64& rng, int leaves) {
    deint::hacot::Dendrogram d;
    std::vector<int> active;
    for (int i = 0; i < leaves; ++i) {
        d.leaf_ids.push_back(i);
        d.leaf_members.push_back({static_cast<std::size_t>(i)});
        active.push_back(i);
    }
    while (active.size() > 1) {
        std::shuffle(active.begin(), active.end(), rng);
        const int a = active.back();
        active.pop_back();
        const int b = active.back();
        active.pop_back();
        const int node = leaves + static_cast<int>(d.merges.size());
        d.merges.push_back({std::min(a, b), std::max(a, b), 1.0, node});
        active.push_back(node);
    }
    return d;
}

// Uniform points in the unit cube.
inline deint::FeatureMatrix random_points(std::mt19937_64& rng, std::size_t n, std::size_t dims) {
    std::vector<std::string> names;
    std::vector<std::vector<double>> cols;
    for (std::size_t c = 0; c < dims; ++c) {
        names.push_back("c" + std::to_string(c));
        cols.push_back(testutil::uniform_sample(rng, n));
    }
    return deint::FeatureMatrix(names, cols);
}

// Two Gaussian blobs at (0,0) and (1,0).
struct Blobs {
    deint::FeatureMatrix m;
    std::vector<int> truth;
};

inline Blobs two_blobs(std::uint64_t seed, std::size_t n = 200, double sigma = 0.01) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, sigma);
    std::vector<double> x, y;
    std::vector<int> truth;
    for (int b = 0; b < 2; ++b)
        for (std::size_t i = 0; i < n; ++i) {
            x.push_back(b + g(rng));
            y.push_back(g(rng));
            truth.push_back(b);
        }
    return {testutil::matrix2(x, y), truth};
}

inline deint::transport::DiscreteMeasure random_measure(std::mt19937_64& rng, std::size_t max_support, double lo = 0.0, double hi = 10.0) {
    std::uniform_int_distribution<std::size_t> nd(1, max_support);
    const std::size_t n = nd(rng);
    return deint::transport::DiscreteMeasure(testutil::uniform_sample(rng, n, lo, hi), testutil::uniform_sample(rng, n, 0.01, 1.0));
}

}  // namespace fixture
