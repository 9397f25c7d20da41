#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "deint/error.hpp"
#include "deint/stats.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace deint;
using namespace deint::stats;

TEST_SUITE("stats") {

TEST_CASE("KS examples") {
    std::mt19937_64 rng(1);
    const auto x = testutil::normal_sample(rng, 57);
    auto r = ks_two_sample(x, x);
    CHECK(r.statistic == 0.0);
    CHECK(r.p_value == 1.0);
    std::vector<double> a(100), b(100);
    std::iota(a.begin(), a.end(), 0.0);
    std::iota(b.begin(), b.end(), 100.0);
    r = ks_two_sample(a, b);
    CHECK(r.statistic == 1.0);
    CHECK(r.p_value < 1e-10);
    CHECK_THROWS_AS(ks_two_sample(std::vector<double>{}, a), ValidationError);
}

TEST_CASE("KS statistic equals the ECDF-sup oracle") {
    std::mt19937_64 rng(2);
    std::uniform_int_distribution<std::size_t> nd(1, 80);
    std::uniform_int_distribution<int> coarse(0, 9);
    for (int rep = 0; rep < 100; ++rep) {
        std::vector<double> x = testutil::normal_sample(rng, nd(rng)), y = testutil::normal_sample(rng, nd(rng), 0.3);
        if (rep % 3 == 0) {  // ties inside and across samples
            for (auto& v : x) v = coarse(rng);
            for (auto& v : y) v = coarse(rng);
        }
        CHECK(std::abs(ks_two_sample(x, y).statistic - oracle::brute_ks(x, y)) <= 1e-12);
    }
}

TEST_CASE("Kolmogorov survival function") {
    CHECK(std::abs(kolmogorov_sf(1.36) - 0.05) <= 5e-3);
    CHECK(kolmogorov_sf(1.36) == doctest::Approx(0.049485876755377876).epsilon(1e-9));
    CHECK(kolmogorov_sf(0.0) == 1.0);
    CHECK(kolmogorov_sf(10.0) < 1e-80);
    double prev = 1.0;
    for (double l = 0.05; l < 3.0; l += 0.05) {
        const double q = kolmogorov_sf(l);
        CHECK(q <= prev);
        CHECK(q >= 0.0);
        prev = q;
    }
}

TEST_CASE("KS Monte-Carlo rejection rate at 1.36/sqrt(n_e)") {
    std::mt19937_64 rng(3);
    const double crit = 1.36 / std::sqrt(50.0);
    int above = 0;
    const int reps = 10'000;
    for (int rep = 0; rep < reps; ++rep) {
        const auto x = testutil::normal_sample(rng, 100), y = testutil::normal_sample(rng, 100);
        if (ks_two_sample(x, y).statistic > crit) ++above;
    }
    const double rate = static_cast<double>(above) / reps;
    CHECK(rate > 0.03);
    CHECK(rate < 0.065);
}

TEST_CASE("KS invariance under increasing transforms") {
    std::mt19937_64 rng(4);
    for (int rep = 0; rep < 20; ++rep) {
        auto x = testutil::normal_sample(rng, 40), y = testutil::normal_sample(rng, 60, 0.5);
        const auto r = ks_two_sample(x, y);
        CHECK(r.statistic >= 0.0);
        CHECK(r.statistic <= 1.0);
        for (auto* s : {&x, &y})
            for (auto& v : *s) v = std::exp(3.0 * v) + 7.0;
        CHECK(ks_two_sample(x, y).statistic == doctest::Approx(r.statistic).epsilon(1e-12));
    }
}

TEST_CASE("Welch examples") {
    const std::vector<double> x{1, 2, 3, 4}, y{2, 3, 4, 5};
    auto r = welch_t_two_sample(x, x);
    CHECK(r.statistic == 0.0);
    CHECK(r.p_value == doctest::Approx(1.0));
    r = welch_t_two_sample(x, y);
    // direct formula: (2.5 - 3.5) / sqrt(5/3/4 + 5/3/4), df = 6
    CHECK(std::abs(r.statistic) == doctest::Approx(1.0954451150103324).epsilon(1e-12));
    CHECK(r.p_value == doctest::Approx(0.3153335962012296).epsilon(1e-9));

    std::mt19937_64 rng(5);
    r = welch_t_two_sample(testutil::normal_sample(rng, 100, 0, 1), testutil::normal_sample(rng, 100, 10, 1));
    CHECK(r.p_value < 1e-10);

    const std::vector<double> c1{3, 3, 3}, c2{3, 3}, c3{4, 4};
    CHECK(welch_t_two_sample(c1, c2).p_value == 1.0);
    CHECK(welch_t_two_sample(c1, c3).p_value == 0.0);
    CHECK_THROWS_AS(welch_t_two_sample(std::vector<double>{1}, y), ValidationError);
}

TEST_CASE("Welch invariant under common affine maps") {
    std::mt19937_64 rng(6);
    for (int rep = 0; rep < 20; ++rep) {
        auto x = testutil::normal_sample(rng, 30), y = testutil::normal_sample(rng, 45, 0.4, 2.0);
        const double p = welch_t_two_sample(x, y).p_value;
        for (auto* s : {&x, &y})
            for (auto& v : *s) v = -4.0 * v + 123.0;
        CHECK(welch_t_two_sample(x, y).p_value == doctest::Approx(p).epsilon(1e-9));
    }
}

TEST_CASE("two_sample dispatch") {
    const std::vector<double> x{1, 2, 3, 4}, y{2, 3, 4, 5};
    CHECK(two_sample(TestKind::KolmogorovSmirnov, x, y).statistic == ks_two_sample(x, y).statistic);
    CHECK(two_sample(TestKind::Student, x, y).p_value == welch_t_two_sample(x, y).p_value);
}

TEST_CASE("p-value threshold") {
    CHECK(pvalue_threshold(std::vector<double>{0, 0, 0.01, 0.5, 0.6, 0.7}) == doctest::Approx(0.01));
    CHECK(pvalue_threshold(std::vector<double>{0.3, 0.3, 0.3}) == 0.2);
    CHECK_THROWS_AS(pvalue_threshold(std::vector<double>{0.1, 0.2}), ValidationError);

    std::mt19937_64 rng(7);
    for (int rep = 0; rep < 200; ++rep) {
        std::uniform_int_distribution<std::size_t> nd(3, 30);
        auto p = testutil::uniform_sample(rng, nd(rng));
        for (auto& v : p) v = std::pow(v, 1 + rep % 5);
        const double lo = *std::min_element(p.begin(), p.end()), hi = *std::max_element(p.begin(), p.end());
        const double a = pvalue_threshold(p);
        CHECK(a >= std::clamp(lo, kMinAlpha, kMaxAlpha));
        CHECK(a <= std::clamp(hi, kMinAlpha, kMaxAlpha));
        CHECK(a > 0.0);
        CHECK(a <= kMaxAlpha);
    }
}

TEST_CASE("Scott bandwidth") {
    CHECK(scott_bandwidth(1.0, 1) == doctest::Approx(1.06));
    CHECK(scott_bandwidth(2.0, 32) == doctest::Approx(1.06));
    CHECK(scott_bandwidth(4.0, 32) == doctest::Approx(2.0 * scott_bandwidth(2.0, 32)));
    CHECK_THROWS_AS(scott_bandwidth(0.0, 5), ValidationError);
    CHECK_THROWS_AS(scott_bandwidth(-1.0, 5), ValidationError);
}

TEST_CASE("KDE") {
    const double h = 0.7;
    KdeModel single({3.0}, h);
    CHECK(kde_log_density(single, std::vector<double>{3.0})[0] ==
          doctest::Approx(std::log(1.0 / (h * std::sqrt(2.0 * std::numbers::pi)))));

    std::mt19937_64 rng(8);
    const auto centers = testutil::normal_sample(rng, 25, 0.0, 2.0);
    KdeModel model(centers, h);
    const double lo = *std::min_element(centers.begin(), centers.end()) - 10 * h;
    const double hi = *std::max_element(centers.begin(), centers.end()) + 10 * h;
    std::vector<double> grid;
    const int steps = 20'000;
    for (int i = 0; i <= steps; ++i) grid.push_back(lo + (hi - lo) * i / steps);
    const auto ld = kde_log_density(model, grid);
    double integral = 0.0;  // trapezoid
    for (int i = 0; i < steps; ++i) integral += 0.5 * (std::exp(ld[i]) + std::exp(ld[i + 1])) * (hi - lo) / steps;
    CHECK(std::abs(integral - 1.0) <= 1e-3);

    const double far = kde_log_density(model, std::vector<double>{hi + 100 * h})[0];
    CHECK(far <= std::log(kDensityFloor) + 1.0);

    auto shuffled = centers;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const auto ld2 = kde_log_density(KdeModel(shuffled, h), grid);
    for (std::size_t i = 0; i < grid.size(); i += 97) CHECK(ld2[i] == doctest::Approx(ld[i]).epsilon(1e-12));

    // monotone in distance from an isolated centre
    KdeModel iso({0.0, 1000.0}, 1.0);
    const auto lm = kde_log_density(iso, std::vector<double>{0.0, 0.5, 1.0, 2.0, 4.0, 8.0});
    for (std::size_t i = 1; i < lm.size(); ++i) CHECK(lm[i] < lm[i - 1]);

    CHECK_THROWS_AS(KdeModel({}, 1.0), ValidationError);
    CHECK_THROWS_AS(KdeModel({1.0}, 0.0), ValidationError);
}

TEST_CASE("mean and variance") {
    const std::vector<double> x{1, 2, 3, 4};
    CHECK(mean(x) == 2.5);
    CHECK(variance(x) == doctest::Approx(5.0 / 3.0));
    CHECK(variance(std::vector<double>{5}) == 0.0);
}

}
