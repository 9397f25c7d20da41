#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "deint/error.hpp"
#include "deint/hdbscan.hpp"
#include "fixtures.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace deint;

TEST_SUITE("hdbscan") {

TEST_CASE("core distances, small cases") {
    const auto line = FeatureMatrix({"x"}, {{0, 1, 2}});
    CHECK(hdbscan::core_distances(line, 2) == std::vector<double>{1, 1, 1});
    CHECK(hdbscan::core_distances(line, 3) == std::vector<double>{2, 1, 2});
    const auto dup = FeatureMatrix({"x"}, {{0, 0, 5}});
    const auto c = hdbscan::core_distances(dup, 2);
    CHECK(c[0] == 0.0);
    CHECK(c[1] == 0.0);
    CHECK_THROWS_AS(hdbscan::core_distances(line, 4), ValidationError);
    CHECK_THROWS_AS(hdbscan::core_distances(line, 1), ValidationError);
}

TEST_CASE("core distances match brute-force kNN") {
    std::mt19937_64 rng(3);
    for (int rep = 0; rep < 20; ++rep) {
        const auto m = fixture::random_points(rng, 60, 1 + rep % 3);
        for (std::size_t k : {2u, 5u, 17u}) {
            const auto got = hdbscan::core_distances(m, k);
            const auto want = oracle::brute_core(m, k);
            for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-12));
        }
    }
}

TEST_CASE("MST weight matches Kruskal over the full graph") {
    std::mt19937_64 rng(5);
    for (int rep = 0; rep < 50; ++rep) {
        std::uniform_int_distribution<std::size_t> nd(2, 50);
        const std::size_t n = nd(rng);
        const auto m = fixture::random_points(rng, n, 2);
        const std::size_t k = std::min<std::size_t>(n, 2 + rep % 6);
        const auto mst = hdbscan::mutual_reachability_mst(m, k);
        REQUIRE(mst.size() == n - 1);
        double w = 0.0;
        const auto core = hdbscan::core_distances(m, k);
        for (const auto& e : mst) {
            w += e.weight;
            CHECK(e.weight >= std::max(core[e.a], core[e.b]));
        }
        CHECK(w == doctest::Approx(oracle::kruskal_weight(m, k)).epsilon(1e-12));
    }
}

TEST_CASE("MST small cases") {
    const auto two = testutil::matrix2({0, 3}, {0, 4});
    const auto e = hdbscan::mutual_reachability_mst(two, 2);
    REQUIRE(e.size() == 1);
    CHECK(e[0].weight == 5.0);
    const auto pairs = testutil::matrix2({0, 0.1, 10, 10.1}, {0, 0, 0, 0});
    const auto mst = hdbscan::mutual_reachability_mst(pairs, 2);
    const auto heaviest = std::max_element(mst.begin(), mst.end(), [](auto& a, auto& b) { return a.weight < b.weight; });
    CHECK(((heaviest->a < 2) != (heaviest->b < 2)));  // the bridge
}

TEST_CASE("two tight blobs") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const auto b = fixture::two_blobs(seed);
        const auto l = hdbscan::cluster(b.m, 15);
        CHECK(l.cluster_count() == 2);
        CHECK(static_cast<double>(l.size() - l.outlier_count()) >= 0.95 * static_cast<double>(l.size()));
        std::map<int, std::set<int>> truth_of;
        for (std::size_t i = 0; i < l.size(); ++i)
            if (l[i] >= 0) truth_of[l[i]].insert(b.truth[i]);
        for (const auto& [k, s] : truth_of) CHECK(s.size() == 1);
    }
}

TEST_CASE("uniform noise stays noise") {
    std::mt19937_64 rng(9);
    const auto m = fixture::random_points(rng, 50, 2);
    const auto l = hdbscan::cluster(m, 25);
    CHECK(l.outlier_count() >= 45);
}

TEST_CASE("every cluster has at least minPts members") {
    std::mt19937_64 rng(13);
    for (int rep = 0; rep < 10; ++rep) {
        std::normal_distribution<double> g(0.0, 0.05);
        std::vector<double> x, y;
        for (int c = 0; c < 4; ++c)
            for (int i = 0; i < 30 + 20 * c; ++i) {
                x.push_back(c % 2 + g(rng));
                y.push_back(c / 2 + g(rng));
            }
        for (std::size_t k : {5u, 10u, 20u}) {
            const auto l = hdbscan::cluster(testutil::matrix2(x, y), k);
            std::map<int, std::size_t> sizes;
            for (int v : l.labels)
                if (v >= 0) ++sizes[v];
            for (const auto& [id, s] : sizes) CHECK(s >= k);
        }
    }
}

TEST_CASE("permutation invariance") {
    const auto b = fixture::two_blobs(21, 120, 0.05);
    const auto base = hdbscan::cluster(b.m, 10);
    std::vector<std::size_t> perm(b.m.rows());
    std::iota(perm.begin(), perm.end(), 0);
    std::mt19937_64 rng(4);
    std::shuffle(perm.begin(), perm.end(), rng);
    const auto shuffled = hdbscan::cluster(b.m.select_rows(perm), 10);
    // same partition: co-membership agrees for every pair
    for (std::size_t i = 0; i < perm.size(); i += 3)
        for (std::size_t j = i + 1; j < perm.size(); j += 5) {
            const bool same_a = base[perm[i]] >= 0 && base[perm[i]] == base[perm[j]];
            const bool same_b = shuffled[i] >= 0 && shuffled[i] == shuffled[j];
            CHECK(same_a == same_b);
            CHECK((base[perm[i]] < 0) == (shuffled[i] < 0));
        }
}

TEST_CASE("larger minPts never adds clusters on fixed data") {
    for (std::uint64_t seed : {31u, 32u, 33u}) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> g(0.0, 0.04);
        std::vector<double> x, y;
        for (int c = 0; c < 5; ++c)
            for (int i = 0; i < 60; ++i) {
                x.push_back(0.3 * c + g(rng));
                y.push_back((c % 2) * 0.2 + g(rng));
            }
        const auto m = testutil::matrix2(x, y);
        std::size_t prev = 1000;
        for (std::size_t k : {5u, 10u, 20u, 40u, 80u}) {
            const auto n = hdbscan::cluster(m, k).cluster_count();
            CHECK(n <= prev);
            prev = n;
        }
    }
}

TEST_CASE("condensed tree stabilities are non-negative") {
    const auto b = fixture::two_blobs(8, 80, 0.05);
    auto r = hdbscan::cluster_with_tree(b.m, 10);
    REQUIRE(!r.tree.clusters.empty());
    for (const auto& c : r.tree.clusters) CHECK(c.stability >= 0.0);
    CHECK(r.tree.members(0).size() == b.m.rows());
}

}
