#include <doctest.h>

#include <cmath>
#include <random>

#include "deint/error.hpp"
#include "deint/metrics.hpp"
#include "oracles.hpp"

using namespace deint;
using namespace deint::metrics;

TEST_SUITE("metrics") {

TEST_CASE("ARI examples") {
    CHECK(adjusted_rand_index(Labeling{{0, 0, 1, 1}}, Labeling{{0, 1, 0, 1}}) == doctest::Approx(-0.5).epsilon(1e-15));
    CHECK(adjusted_rand_index(Labeling{{0, 0, 1, 1, 2}}, Labeling{{5, 5, 9, 9, 3}}) == 1.0);
    CHECK(adjusted_rand_index(Labeling{{0, 0, 0}}, Labeling{{1, 1, 1}}) == 1.0);
    CHECK_THROWS_AS(adjusted_rand_index(Labeling{{0}}, Labeling{{0, 1}}), ValidationError);
}

TEST_CASE("ARI matches the contingency-table oracle") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<std::size_t> nd(2, 30);
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t n = nd(rng);
        const auto t = oracle::random_labels(rng, n, 1 + rep % 5), p = oracle::random_labels(rng, n, 1 + rep % 7);
        CHECK(std::abs(adjusted_rand_index(t, p) - oracle::ari(t.labels, p.labels)) <= 1e-12);
    }
}

TEST_CASE("ARI symmetry, relabeling and identity") {
    std::mt19937_64 rng(12);
    for (int rep = 0; rep < 50; ++rep) {
        const auto t = oracle::random_labels(rng, 40, 4), p = oracle::random_labels(rng, 40, 3);
        const double a = adjusted_rand_index(t, p);
        CHECK(a <= 1.0);
        CHECK(std::abs(a - adjusted_rand_index(p, t)) <= 1e-12);
        Labeling renamed = p;
        for (auto& v : renamed.labels)
            if (v >= 0) v = 100 - 7 * v;
        CHECK(std::abs(a - adjusted_rand_index(t, renamed)) <= 1e-12);
        CHECK(adjusted_rand_index(t, t) == 1.0);
        const bool same = canonicalize(t).labels == canonicalize(p).labels;
        CHECK((a == doctest::Approx(1.0)) == same);
    }
}

TEST_CASE("ARI of random predictions is near zero") {
    std::mt19937_64 rng(13);
    const auto truth = oracle::random_labels(rng, 200, 3, false);
    double sum = 0.0;
    for (int rep = 0; rep < 1000; ++rep) sum += adjusted_rand_index(truth, oracle::random_labels(rng, 200, 4, false));
    CHECK(std::abs(sum / 1000.0) < 0.05);
}

TEST_CASE("outlier modes") {
    const Labeling t{{0, 0, 1, 1, -1, -1}}, p{{0, 0, 1, 1, 1, 0}};
    CHECK(adjusted_rand_index(t, p, OutlierMode::Exclude) == 1.0);
    CHECK(adjusted_rand_index(t, p, OutlierMode::AsClass) < 1.0);
    // losing pulses costs ARI in the default mode
    const Labeling lost{{0, 0, -1, -1, -1, -1}};
    CHECK(adjusted_rand_index(Labeling{{0, 0, 1, 1, 2, 2}}, lost) < 1.0);
}

TEST_CASE("summarize_run") {
    const Labeling t{{0, 0, 1, 1}};
    auto s = summarize_run(t, t);
    CHECK(s.ari == 1.0);
    CHECK(s.outlier_fraction == 0.0);
    CHECK(s.detected_emitters == 2);
    CHECK(s.injected_in_clusters == 0.0);

    const Labeling truth{{0, 0, 1, 1, -1, -1, -1, -1}}, pred{{3, 3, 4, 4, 3, -1, -1, -1}};
    const std::vector<bool> mask{false, false, false, false, true, true, true, true};
    s = summarize_run(truth, pred, mask);
    CHECK(s.ari == 1.0);  // injected pulses do not enter the ARI
    CHECK(s.injected_in_clusters == doctest::Approx(0.25));
    CHECK(s.outlier_fraction == doctest::Approx(3.0 / 8.0));
    CHECK(s.detected_emitters == 2);
    CHECK_THROWS_AS(summarize_run(truth, pred, std::vector<bool>{true}), ValidationError);

    std::mt19937_64 rng(14);
    for (int rep = 0; rep < 50; ++rep) {
        const auto a = oracle::random_labels(rng, 30, 3), b = oracle::random_labels(rng, 30, 3);
        std::vector<bool> m(30);
        for (std::size_t i = 0; i < 30; ++i) m[i] = (rng() & 3) == 0;
        s = summarize_run(a, b, m);
        CHECK(s.ari <= 1.0);
        CHECK(s.outlier_fraction >= 0.0);
        CHECK(s.outlier_fraction <= 1.0);
        CHECK(s.injected_in_clusters >= 0.0);
        CHECK(s.injected_in_clusters <= 1.0);
    }
}

}
