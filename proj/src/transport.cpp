#include "deint/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

#include "deint/error.hpp"

namespace deint::transport {

DiscreteMeasure::DiscreteMeasure(std::vector<double> positions, std::vector<double> weights) {
    if (positions.empty()) throw ValidationError("measure needs at least one atom");
    if (positions.size() != weights.size()) throw ValidationError("measure positions/weights length mismatch");
    double total = 0.0;
    for (std::size_t i = 0; i < positions.size(); ++i) {
        if (!std::isfinite(positions[i])) throw ValidationError("measure position must be finite");
        if (!(weights[i] >= 0.0) || !std::isfinite(weights[i]))
            throw ValidationError("measure weights must be finite and non-negative");
        total += weights[i];
    }
    if (!(total > 0.0)) throw ValidationError("measure has zero total mass");

    std::vector<std::size_t> order(positions.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return positions[a] < positions[b]; });
    for (auto i : order) {
        if (weights[i] == 0.0) continue;
        if (!positions_.empty() && positions_.back() == positions[i]) {
            weights_.back() += weights[i];
        } else {
            positions_.push_back(positions[i]);
            weights_.push_back(weights[i]);
        }
    }
    double kept = std::accumulate(weights_.begin(), weights_.end(), 0.0);
    for (auto& w : weights_) w /= kept;
}

DiscreteMeasure DiscreteMeasure::dirac(double position) { return DiscreteMeasure({position}, {1.0}); }

DiscreteMeasure DiscreteMeasure::shifted(double offset) const {
    DiscreteMeasure out = *this;
    for (auto& p : out.positions_) p += offset;
    return out;
}

DiscreteMeasure cluster_measure(std::span<const double> toas, std::span<const double> levels_db) {
    if (toas.empty()) throw ValidationError("cluster_measure needs at least one pulse");
    if (toas.size() != levels_db.size()) throw ValidationError("cluster_measure toas/levels length mismatch");
    // powers relative to the strongest pulse; the common factor cancels in the normalisation
    const double peak = *std::max_element(levels_db.begin(), levels_db.end());
    std::vector<double> w(levels_db.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::pow(10.0, (levels_db[i] - peak) / 10.0);
    return DiscreteMeasure(std::vector<double>(toas.begin(), toas.end()), std::move(w));
}

namespace {

double quantile_sorted(const std::vector<double>& sorted, double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

double freedman_diaconis_width(std::span<const double> positions) {
    std::vector<double> sorted(positions.begin(), positions.end());
    std::sort(sorted.begin(), sorted.end());
    if (sorted.empty() || sorted.front() == sorted.back()) return 0.0;
    const double n = static_cast<double>(sorted.size());
    const double iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
    if (iqr > 0.0) return 2.0 * iqr / std::cbrt(n);
    // Scott-style fallback for a degenerate IQR
    const double mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : sorted) ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / n);
    return 3.49 * sd / std::cbrt(n);
}

DiscreteMeasure histogram_measure(const DiscreteMeasure& measure) {
    const auto pos = measure.positions();
    const auto w = measure.weights();
    if (measure.size() <= 1) return measure;
    const double lo = pos.front(), hi = pos.back();
    const double range = hi - lo;
    const double h = freedman_diaconis_width(pos);
    const double bins_real = std::ceil(range / h);
    const auto bins = static_cast<std::size_t>(std::max(1.0, std::min(bins_real, 1e9)));
    const double width = range / static_cast<double>(bins);

    std::vector<double> centres, masses;
    std::size_t current = std::numeric_limits<std::size_t>::max();
    for (std::size_t i = 0; i < pos.size(); ++i) {
        auto b = static_cast<std::size_t>(std::floor((pos[i] - lo) / width));
        if (b >= bins) b = bins - 1;
        if (b != current) {
            centres.push_back(lo + (static_cast<double>(b) + 0.5) * width);
            masses.push_back(0.0);
            current = b;
        }
        masses.back() += w[i];
    }
    return DiscreteMeasure(std::move(centres), std::move(masses));
}

double wasserstein_1d(const DiscreteMeasure& a, const DiscreteMeasure& b) {
    const auto xa = a.positions(), wa = a.weights();
    const auto xb = b.positions(), wb = b.weights();
    if (xa.empty() || xb.empty()) throw ValidationError("wasserstein_1d needs non-empty measures");
    std::size_t i = 0, j = 0;
    double fa = 0.0, fb = 0.0;  // CDFs just right of `prev`
    double prev = std::min(xa[0], xb[0]);
    double total = 0.0;
    while (i < xa.size() || j < xb.size()) {
        const double next = (j >= xb.size() || (i < xa.size() && xa[i] <= xb[j])) ? xa[i] : xb[j];
        total += std::abs(fa - fb) * (next - prev);
        while (i < xa.size() && xa[i] == next) fa += wa[i++];
        while (j < xb.size() && xb[j] == next) fb += wb[j++];
        prev = next;
    }
    return total;
}

// ---------------------------------------------------------------------------
// Transportation simplex

TransportPlan solve_ot_lp(const DiscreteMeasure& a, const DiscreteMeasure& b) {
    const std::size_t m = a.size(), n = b.size();
    if (m == 0 || n == 0) throw ValidationError("solve_ot_lp needs non-empty measures");
    if (m > kMaxLpSupport || n > kMaxLpSupport)
        throw ValidationError("solve_ot_lp supports at most " + std::to_string(kMaxLpSupport) + " atoms per side");

    const auto xa = a.positions(), xb = b.positions();
    std::vector<double> cost(m * n);
    double cmax = 0.0;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            cost[i * n + j] = std::abs(xa[i] - xb[j]);
            cmax = std::max(cmax, cost[i * n + j]);
        }
    const double eps = 1e-13 * std::max(cmax, 1.0);

    std::vector<double> flow(m * n, 0.0);
    std::vector<char> basic(m * n, 0);

    // North-west corner on the rows taken in reverse order: an anti-monotone start, so the
    // optimum is reached by pivoting rather than handed over by the initial basis.
    {
        std::vector<double> ra(a.weights().begin(), a.weights().end());
        std::vector<double> rb(b.weights().begin(), b.weights().end());
        std::size_t r = 0, j = 0;
        while (true) {
            const std::size_t i = m - 1 - r;
            const double q = std::min(ra[i], rb[j]);
            flow[i * n + j] = q;
            basic[i * n + j] = 1;
            ra[i] -= q;
            rb[j] -= q;
            if (r == m - 1 && j == n - 1) break;
            if (r == m - 1) ++j;
            else if (j == n - 1) ++r;
            else if (ra[i] <= rb[j]) ++r;
            else ++j;
        }
    }

    // graph nodes: rows 0..m-1, columns m..m+n-1
    std::vector<double> u(m), v(n);
    std::vector<std::vector<std::size_t>> adj(m + n);
    std::vector<std::ptrdiff_t> parent(m + n);
    std::vector<char> seen(m + n);

    auto rebuild_adjacency = [&] {
        for (auto& l : adj) l.clear();
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (basic[i * n + j]) {
                    adj[i].push_back(m + j);
                    adj[m + j].push_back(i);
                }
    };

    const std::size_t max_iter = 50 * m * n + 1000;
    for (std::size_t iter = 0; iter < max_iter; ++iter) {
        rebuild_adjacency();
        // potentials: u_0 = 0, c_ij = u_i + v_j on basic cells
        std::fill(seen.begin(), seen.end(), 0);
        std::queue<std::size_t> q;
        q.push(0);
        seen[0] = 1;
        u[0] = 0.0;
        while (!q.empty()) {
            const std::size_t x = q.front();
            q.pop();
            for (std::size_t y : adj[x]) {
                if (seen[y]) continue;
                seen[y] = 1;
                if (x < m) v[y - m] = cost[x * n + (y - m)] - u[x];
                else u[y] = cost[y * n + (x - m)] - v[x - m];
                q.push(y);
            }
        }

        // entering cell: first negative reduced cost (Bland)
        std::size_t ei = m, ej = n;
        for (std::size_t i = 0; i < m && ei == m; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (!basic[i * n + j] && cost[i * n + j] - u[i] - v[j] < -eps) {
                    ei = i;
                    ej = j;
                    break;
                }
        if (ei == m) break;

        // tree path from column ej to row ei closes the cycle with the entering cell
        std::fill(seen.begin(), seen.end(), 0);
        std::fill(parent.begin(), parent.end(), -1);
        std::queue<std::size_t> bfs;
        bfs.push(m + ej);
        seen[m + ej] = 1;
        while (!bfs.empty() && !seen[ei]) {
            const std::size_t x = bfs.front();
            bfs.pop();
            for (std::size_t y : adj[x]) {
                if (seen[y]) continue;
                seen[y] = 1;
                parent[y] = static_cast<std::ptrdiff_t>(x);
                bfs.push(y);
            }
        }
        // walk ei -> ... -> m+ej; cells alternate -, +, -, ... starting after the entering (+) cell
        std::vector<std::size_t> cells;
        for (std::size_t x = ei; parent[x] >= 0; x = static_cast<std::size_t>(parent[x])) {
            const auto y = static_cast<std::size_t>(parent[x]);
            const std::size_t i = x < m ? x : y;
            const std::size_t j = (x < m ? y : x) - m;
            cells.push_back(i * n + j);
        }
        double theta = std::numeric_limits<double>::infinity();
        std::size_t leave = m * n;
        for (std::size_t k = 0; k < cells.size(); k += 2) {
            const std::size_t c = cells[k];
            if (flow[c] < theta || (flow[c] == theta && c < leave)) {
                theta = flow[c];
                leave = c;
            }
        }
        for (std::size_t k = 0; k < cells.size(); ++k) flow[cells[k]] += (k % 2 == 0) ? -theta : theta;
        flow[ei * n + ej] = theta;
        basic[ei * n + ej] = 1;
        basic[leave] = 0;
        flow[leave] = 0.0;
        if (iter + 1 == max_iter) throw Error("solve_ot_lp did not converge");
    }

    TransportPlan plan;
    plan.rows = m;
    plan.cols = n;
    plan.flow = std::move(flow);
    for (auto& f : plan.flow)
        if (f < 0.0) f = 0.0;
    for (std::size_t c = 0; c < m * n; ++c) plan.cost += plan.flow[c] * cost[c];
    return plan;
}

}  // namespace deint::transport
