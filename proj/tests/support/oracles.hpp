#pragma once

// Direct reference implementations shared by the unit tests and the acceptance binary.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <tuple>
#include <vector>

#include "deint/pdw.hpp"

namespace oracle {

inline deint::Labeling random_labels(std::mt19937_64& rng, std::size_t n, int k, bool with_outliers = true) {
    std::uniform_int_distribution<int> d(with_outliers ? -1 : 0, k - 1);
    deint::Labeling l;
    for (std::size_t i = 0; i < n; ++i) l.labels.push_back(d(rng));
    return l;
}

// Contingency-table ARI, O(n^2) pair-count form with -1 as its own class.
inline double ari(const std::vector<int>& t, const std::vector<int>& p) {
    const std::size_t n = t.size();
    double same_both = 0, same_t = 0, same_p = 0, pairs = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool a = t[i] == t[j], b = p[i] == p[j];
            same_both += a && b;
            same_t += a;
            same_p += b;
            pairs += 1;
        }
    const double expected = same_t * same_p / pairs;
    const double max_index = 0.5 * (same_t + same_p);
    if (max_index == expected) return 1.0;
    return (same_both - expected) / (max_index - expected);
}

inline double ecdf(const std::vector<double>& s, double t) {
    return static_cast<double>(std::count_if(s.begin(), s.end(), [&](double v) { return v <= t; })) /
           static_cast<double>(s.size());
}

inline double brute_ks(const std::vector<double>& x, const std::vector<double>& y) {
    double d = 0.0;
    for (const auto* s : {&x, &y})
        for (double t : *s) d = std::max(d, std::abs(ecdf(x, t) - ecdf(y, t)));
    return d;
}

inline double dist(const deint::FeatureMatrix& m, std::size_t i, std::size_t j) {
    double s = 0.0;
    for (std::size_t c = 0; c < m.cols(); ++c) {
        const double d = m.at(i, c) - m.at(j, c);
        s += d * d;
    }
    return std::sqrt(s);
}

inline std::vector<double> brute_core(const deint::FeatureMatrix& m, std::size_t min_pts) {
    std::vector<double> out;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        std::vector<double> d;
        for (std::size_t j = 0; j < m.rows(); ++j)
            if (j != i) d.push_back(dist(m, i, j));
        std::sort(d.begin(), d.end());
        out.push_back(d[min_pts - 2]);
    }
    return out;
}

inline int find(std::vector<int>& p, int x) {
    while (p[x] != x) x = p[x] = p[p[x]];
    return x;
}

// Kruskal on the full mutual-reachability graph
inline double kruskal_weight(const deint::FeatureMatrix& m, std::size_t min_pts) {
    const auto core = brute_core(m, min_pts);
    std::vector<std::tuple<double, int, int>> edges;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = i + 1; j < m.rows(); ++j)
            edges.emplace_back(std::max({dist(m, i, j), core[i], core[j]}), static_cast<int>(i), static_cast<int>(j));
    std::sort(edges.begin(), edges.end());
    std::vector<int> p(m.rows());
    std::iota(p.begin(), p.end(), 0);
    double w = 0.0;
    for (auto [d, a, b] : edges) {
        const int ra = find(p, a), rb = find(p, b);
        if (ra == rb) continue;
        p[ra] = rb;
        w += d;
    }
    return w;
}

}  // namespace oracle
