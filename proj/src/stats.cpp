#include "deint/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "deint/error.hpp"

namespace deint::stats {

double mean(std::span<const double> x) {
    if (x.empty()) return 0.0;
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
    if (x.size() < 2) return 0.0;
    const double m = mean(x);
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    return ss / static_cast<double>(x.size() - 1);
}

double kolmogorov_sf(double lambda) {
    if (!(lambda > 0.0)) return 1.0;
    if (lambda < 0.3) {
        // the alternating series converges too slowly here; use the Jacobi-dual form of the CDF
        const double pi2 = std::numbers::pi * std::numbers::pi;
        double s = 0.0;
        for (int k = 1; k <= 100; ++k) {
            const double odd = 2.0 * k - 1.0;
            const double term = std::exp(-odd * odd * pi2 / (8.0 * lambda * lambda));
            s += term;
            if (term < 1e-300) break;
        }
        const double cdf = std::sqrt(2.0 * std::numbers::pi) / lambda * s;
        return std::clamp(1.0 - cdf, 0.0, 1.0);
    }
    double s = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        s += (k % 2 == 1) ? term : -term;
    }
    return std::clamp(2.0 * s, 0.0, 1.0);
}

TestResult ks_two_sample(std::span<const double> x, std::span<const double> y) {
    if (x.empty() || y.empty()) throw ValidationError("ks_two_sample needs non-empty samples");
    std::vector<double> a(x.begin(), x.end()), b(y.begin(), y.end());
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == v) ++i;
        while (j < b.size() && b[j] == v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    // once one sample is exhausted its ECDF is 1; the other only moves closer to 1
    const double ne = na * nb / (na + nb);
    return TestResult{d, kolmogorov_sf(std::sqrt(ne) * d)};
}

TestResult welch_t_two_sample(std::span<const double> x, std::span<const double> y) {
    if (x.size() < 2 || y.size() < 2) throw ValidationError("welch_t_two_sample needs >= 2 values per sample");
    const double nx = static_cast<double>(x.size()), ny = static_cast<double>(y.size());
    const double mx = mean(x), my = mean(y);
    const double vx = variance(x) / nx, vy = variance(y) / ny;
    const double se2 = vx + vy;
    if (se2 == 0.0) {
        if (mx == my) return TestResult{0.0, 1.0};
        return TestResult{mx > my ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity(),
                          0.0};
    }
    const double t = (mx - my) / std::sqrt(se2);
    const double df = se2 * se2 / (vx * vx / (nx - 1.0) + vy * vy / (ny - 1.0));
    const boost::math::students_t_distribution<double> dist(df);
    const double p = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
    return TestResult{t, std::clamp(p, 0.0, 1.0)};
}

TestResult two_sample(TestKind kind, std::span<const double> x, std::span<const double> y) {
    return kind == TestKind::Student ? welch_t_two_sample(x, y) : ks_two_sample(x, y);
}

double pvalue_threshold(std::span<const double> pvalues) {
    if (pvalues.size() < 3) throw ValidationError("pvalue_threshold needs at least 3 p-values");
    std::vector<double> p(pvalues.begin(), pvalues.end());
    std::sort(p.begin(), p.end());
    const std::size_t n = p.size();
    double alpha = p.front();
    if (p.front() != p.back()) {
        // distance to the chord is proportional to |chord(x) - p(x)|
        const double slope = (p.back() - p.front()) / static_cast<double>(n - 1);
        double best = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double dist = std::abs(p.front() + slope * static_cast<double>(i) - p[i]);
            if (dist > best) {
                best = dist;
                alpha = p[i];
            }
        }
    }
    return std::clamp(alpha, kMinAlpha, kMaxAlpha);
}

double scott_bandwidth(double sigma, std::size_t n) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ValidationError("scott_bandwidth needs sigma > 0");
    if (n < 1) throw ValidationError("scott_bandwidth needs n >= 1");
    return 1.06 * sigma * std::pow(static_cast<double>(n), -0.2);
}

KdeModel::KdeModel(std::vector<double> centers, double bandwidth) : centers_(std::move(centers)), bandwidth_(bandwidth) {
    if (centers_.empty()) throw ValidationError("KDE needs at least one center");
    if (!(bandwidth_ > 0.0) || !std::isfinite(bandwidth_)) throw ValidationError("KDE bandwidth must be > 0");
    std::sort(centers_.begin(), centers_.end());
}

std::vector<double> kde_log_density(const KdeModel& model, std::span<const double> points) {
    const auto c = model.centers();
    const double h = model.bandwidth();
    const double log_norm = -std::log(static_cast<double>(c.size()) * h * std::sqrt(2.0 * std::numbers::pi));
    const double log_floor = std::log(kDensityFloor);
    // kernels beyond 40 h are below exp(-800) relative to any kernel inside the window
    const double reach = 40.0 * h;
    std::vector<double> out;
    out.reserve(points.size());
    std::vector<double> exps;
    for (double x : points) {
        const auto lo = std::lower_bound(c.begin(), c.end(), x - reach);
        const auto hi = std::upper_bound(lo, c.end(), x + reach);
        if (lo == hi) {
            out.push_back(log_floor);
            continue;
        }
        exps.clear();
        double top = -std::numeric_limits<double>::infinity();
        for (auto it = lo; it != hi; ++it) {
            const double z = (x - *it) / h;
            exps.push_back(-0.5 * z * z);
            top = std::max(top, exps.back());
        }
        double s = 0.0;
        for (double e : exps) s += std::exp(e - top);
        out.push_back(std::max(log_norm + top + std::log(s), log_floor));
    }
    return out;
}

}  // namespace deint::stats
