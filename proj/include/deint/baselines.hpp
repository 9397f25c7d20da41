#pragma once

// PRI-based reference methods: cumulative (CDIF) and sequential (SDIF)
// difference histograms, and the PRI transform. Histograms only; there is no
// sequence search stage.

#include <cstddef>
#include <span>
#include <vector>

namespace deint::baselines {

struct PriRange {
    double lo = 0.0;  // us
    double hi = 0.0;  // us
};

/// Uniform histogram over [lo, hi). `order` is the difference order (CDIF: highest order cumulated),
/// 0 for the PRI transform.
struct PriHistogram {
    double lo = 0.0;
    double bin_width = 1.0;
    std::vector<double> bin_centers;
    std::vector<double> values;
    std::vector<double> thresholds;  // detection threshold per bin
    int order = 0;

    std::size_t bins() const noexcept { return values.size(); }
};

struct DifOptions {
    int max_order = 4;
    double bin_width = 1.0;   // us
    double x = 0.5;           // threshold coefficient
    double decay = 1.0;       // SDIF only: exp(-b / (decay * bins))
    std::size_t max_peak_bins = 3;
};

struct DifResult {
    std::vector<PriHistogram> histograms;  // one per order 1..max_order
    std::vector<double> detected;          // us, ascending
};

/// Histograms of t[i+k] - t[i] cumulated over k = 1..max_order. Threshold x * T_obs / tau.
DifResult cdif(std::span<const double> toas, PriRange range, const DifOptions& opt = {});

/// Per-order histograms with threshold x * (N - k) * exp(-b / (decay * bins)).
DifResult sdif(std::span<const double> toas, PriRange range, const DifOptions& opt = {});

struct PriTransformOptions {
    std::size_t bins = 0;        // 0: one bin per microsecond of the range
    double alpha = 0.5;          // x T_obs / tau term
    double beta = 4.0;           // noise term, beta * sqrt(rho^2 T_obs b)
    double gamma = 0.4;          // fraction of the plain pair count
    std::size_t max_peak_bins = 3;
};

struct PriTransformResult {
    PriHistogram histogram;
    std::vector<double> counts;  // plain pair counts per bin
    std::vector<double> detected;
};

/// D(tau_b) = |sum exp(2 pi i (t_n - t_0) / (t_m - t_n))| over pairs whose difference falls in bin b.
PriTransformResult pri_transform(std::span<const double> toas, PriRange range, const PriTransformOptions& opt = {});

/// Runs of at most `max_peak_bins` consecutive above-threshold bins, one detection (the run's
/// largest bin) per run. A detection within one bin of a kept one, or within (m + 1) / 2 bins of
/// m times a smaller kept one (m >= 2), is dropped.
std::vector<double> isolated_peaks(const PriHistogram& h, std::size_t max_peak_bins);

/// True when some value in `detected` lies within `tolerance` of `pri`.
bool recovers(std::span<const double> detected, double pri, double tolerance);

}  // namespace deint::baselines
