#include "deint/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "deint/error.hpp"

namespace deint::baselines {

namespace {

std::vector<double> sorted_toas(std::span<const double> toas) {
    if (toas.size() < 2) throw ValidationError("PRI histograms need at least 2 toas");
    std::vector<double> t(toas.begin(), toas.end());
    for (double x : t)
        if (!std::isfinite(x)) throw ValidationError("toa must be finite");
    std::sort(t.begin(), t.end());
    return t;
}

PriHistogram empty_histogram(PriRange range, double bin_width, std::size_t bins) {
    if (!(std::isfinite(range.lo) && std::isfinite(range.hi)) || range.lo < 0.0 || !(range.hi > range.lo))
        throw ValidationError("PRI range must satisfy 0 <= lo < hi");
    if (!(bin_width > 0.0)) throw ValidationError("bin width must be > 0");
    if (bins == 0) bins = static_cast<std::size_t>(std::ceil((range.hi - range.lo) / bin_width - 1e-9));
    PriHistogram h;
    h.lo = range.lo;
    h.bin_width = bin_width;
    h.values.assign(bins, 0.0);
    h.thresholds.assign(bins, 0.0);
    for (std::size_t b = 0; b < bins; ++b) h.bin_centers.push_back(range.lo + (static_cast<double>(b) + 0.5) * bin_width);
    return h;
}

// -1 when outside
long bin_of(const PriHistogram& h, double d) {
    const double u = (d - h.lo) / h.bin_width;
    if (!(u >= 0.0)) return -1;
    const auto b = static_cast<long>(std::floor(u));
    return b < static_cast<long>(h.bins()) ? b : -1;
}

void check_dif(const DifOptions& opt) {
    if (opt.max_order < 1) throw ValidationError("max_order must be >= 1");
    if (!(opt.x > 0.0)) throw ValidationError("threshold coefficient must be > 0");
    if (!(opt.decay > 0.0)) throw ValidationError("threshold decay must be > 0");
    if (opt.max_peak_bins < 1) throw ValidationError("max_peak_bins must be >= 1");
}

PriHistogram order_histogram(const std::vector<double>& t, PriRange range, double w, int k) {
    PriHistogram h = empty_histogram(range, w, 0);
    h.order = k;
    const std::size_t ks = static_cast<std::size_t>(k);
    for (std::size_t i = 0; i + ks < t.size(); ++i) {
        const long b = bin_of(h, t[i + ks] - t[i]);
        if (b >= 0) h.values[static_cast<std::size_t>(b)] += 1.0;
    }
    return h;
}

std::vector<double> drop_harmonics(std::vector<double> d, double w) {
    std::sort(d.begin(), d.end());
    std::vector<double> kept;
    for (double x : d) {
        bool harmonic = false;
        for (double k : kept) {
            if (std::abs(x - k) <= w) {  // same peak found twice
                harmonic = true;
                break;
            }
            // bin centres are off by up to w/2, so m * k is off by up to m * w/2
            const double m = std::round(x / k);
            if (m >= 2.0 && std::abs(x - m * k) <= (m + 1.0) * w / 2.0) {
                harmonic = true;
                break;
            }
        }
        if (!harmonic) kept.push_back(x);
    }
    return kept;
}

}  // namespace

std::vector<double> isolated_peaks(const PriHistogram& h, std::size_t max_peak_bins) {
    std::vector<double> out;
    std::size_t b = 0;
    while (b < h.bins()) {
        if (!(h.values[b] > h.thresholds[b])) {
            ++b;
            continue;
        }
        std::size_t e = b, best = b;
        while (e < h.bins() && h.values[e] > h.thresholds[e]) {
            if (h.values[e] > h.values[best]) best = e;
            ++e;
        }
        if (e - b <= max_peak_bins) out.push_back(h.bin_centers[best]);
        b = e;
    }
    return drop_harmonics(std::move(out), h.bin_width);
}

DifResult cdif(std::span<const double> toas, PriRange range, const DifOptions& opt) {
    check_dif(opt);
    const auto t = sorted_toas(toas);
    const double span_t = t.back() - t.front();
    DifResult res;
    PriHistogram acc = empty_histogram(range, opt.bin_width, 0);
    for (int k = 1; k <= opt.max_order; ++k) {
        const PriHistogram hk = order_histogram(t, range, opt.bin_width, k);
        for (std::size_t b = 0; b < acc.bins(); ++b) {
            acc.values[b] += hk.values[b];
            acc.thresholds[b] = opt.x * span_t / acc.bin_centers[b];
        }
        acc.order = k;
        res.histograms.push_back(acc);
    }
    res.detected = isolated_peaks(res.histograms.back(), opt.max_peak_bins);
    return res;
}

DifResult sdif(std::span<const double> toas, PriRange range, const DifOptions& opt) {
    check_dif(opt);
    const auto t = sorted_toas(toas);
    DifResult res;
    std::vector<double> all;
    for (int k = 1; k <= opt.max_order; ++k) {
        PriHistogram hk = order_histogram(t, range, opt.bin_width, k);
        const double nb = static_cast<double>(hk.bins());
        const double e = std::max(0.0, static_cast<double>(t.size()) - static_cast<double>(k));
        for (std::size_t b = 0; b < hk.bins(); ++b)
            hk.thresholds[b] = opt.x * e * std::exp(-static_cast<double>(b) / (opt.decay * nb));
        for (double d : isolated_peaks(hk, opt.max_peak_bins)) all.push_back(d);
        res.histograms.push_back(std::move(hk));
    }
    res.detected = drop_harmonics(std::move(all), opt.bin_width);
    return res;
}

PriTransformResult pri_transform(std::span<const double> toas, PriRange range, const PriTransformOptions& opt) {
    if (!(range.lo > 0.0)) throw ValidationError("PRI transform range needs lo > 0");
    if (opt.max_peak_bins < 1) throw ValidationError("max_peak_bins must be >= 1");
    if (!(opt.alpha >= 0.0 && opt.beta >= 0.0 && opt.gamma >= 0.0)) throw ValidationError("threshold coefficients must be >= 0");
    const auto t = sorted_toas(toas);
    if (!(std::isfinite(range.hi) && range.hi > range.lo)) throw ValidationError("PRI range must satisfy lo < hi");
    const std::size_t bins = opt.bins ? opt.bins : static_cast<std::size_t>(std::ceil(range.hi - range.lo - 1e-9));
    PriTransformResult res;
    res.histogram = empty_histogram(range, (range.hi - range.lo) / static_cast<double>(bins), bins);
    auto& h = res.histogram;
    res.counts.assign(h.bins(), 0.0);

    std::vector<std::complex<double>> acc(h.bins());
    const double t0 = t.front();
    for (std::size_t n = 0; n < t.size(); ++n) {
        for (std::size_t m = n + 1; m < t.size(); ++m) {
            const double d = t[m] - t[n];
            if (d >= range.hi) break;
            const long b = bin_of(h, d);
            if (b < 0) continue;
            acc[static_cast<std::size_t>(b)] += std::polar(1.0, 2.0 * std::numbers::pi * (t[n] - t0) / d);
            res.counts[static_cast<std::size_t>(b)] += 1.0;
        }
    }

    const double span_t = t.back() - t.front();
    if (!(span_t > 0.0)) throw ValidationError("PRI transform needs toas spanning a positive interval");
    const double rho = static_cast<double>(t.size()) / span_t;
    const double noise = opt.beta * std::sqrt(rho * rho * span_t * h.bin_width);
    for (std::size_t b = 0; b < h.bins(); ++b) {
        h.values[b] = std::abs(acc[b]);
        h.thresholds[b] = std::max({opt.alpha * span_t / h.bin_centers[b], noise, opt.gamma * res.counts[b]});
    }
    res.detected = isolated_peaks(h, opt.max_peak_bins);
    return res;
}

bool recovers(std::span<const double> detected, double pri, double tolerance) {
    return std::any_of(detected.begin(), detected.end(), [&](double d) { return std::abs(d - pri) <= tolerance; });
}

}  // namespace deint::baselines
