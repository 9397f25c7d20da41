#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace deint::stats {

struct TestResult {
    double statistic = 0.0;
    double p_value = 1.0;
};

enum class TestKind { KolmogorovSmirnov, Student };

/// Two-sample Kolmogorov-Smirnov: D = sup |F_x - F_y|, p from the asymptotic
/// Kolmogorov distribution at sqrt(n_e) D with n_e = nx ny / (nx + ny).
TestResult ks_two_sample(std::span<const double> x, std::span<const double> y);

/// Survival function of the Kolmogorov distribution, Q(lambda) = 2 sum (-1)^(k-1) exp(-2 k^2 lambda^2).
double kolmogorov_sf(double lambda);

/// Welch's unequal-variance t test, two-sided.
TestResult welch_t_two_sample(std::span<const double> x, std::span<const double> y);

TestResult two_sample(TestKind kind, std::span<const double> x, std::span<const double> y);

/// Confidence level from a set of p-values: knee of the sorted curve (largest
/// distance to the chord between its end points), clamped to (0, 0.2].
double pvalue_threshold(std::span<const double> pvalues);

inline constexpr double kMaxAlpha = 0.2;
inline constexpr double kMinAlpha = 1e-12;

/// h = 1.06 sigma n^(-1/5).
double scott_bandwidth(double sigma, std::size_t n);

/// Gaussian KDE over 1-D sample points.
class KdeModel {
public:
    KdeModel(std::vector<double> centers, double bandwidth);

    std::span<const double> centers() const noexcept { return centers_; }
    double bandwidth() const noexcept { return bandwidth_; }

private:
    std::vector<double> centers_;  // sorted
    double bandwidth_;
};

inline constexpr double kDensityFloor = 1e-300;

/// log f(x) for each point, computed with log-sum-exp; f is floored at kDensityFloor.
std::vector<double> kde_log_density(const KdeModel& model, std::span<const double> points);

double mean(std::span<const double> x);
/// Sample variance (n - 1 denominator); 0 for fewer than 2 values.
double variance(std::span<const double> x);

}  // namespace deint::stats
