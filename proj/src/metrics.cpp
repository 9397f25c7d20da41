#include "deint/metrics.hpp"

#include <map>

#include "deint/error.hpp"

namespace deint::metrics {
namespace {

double comb2(double x) { return x * (x - 1.0) / 2.0; }

}  // namespace

double adjusted_rand_index(const Labeling& truth, const Labeling& pred, OutlierMode mode) {
    if (truth.size() != pred.size())
        throw ValidationError("adjusted_rand_index: label lengths differ (" + std::to_string(truth.size()) + " vs " +
                              std::to_string(pred.size()) + ")");
    std::map<std::pair<int, int>, double> table;
    std::map<int, double> rows, cols;
    double n = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        int t = truth[i] < 0 ? kOutlier : truth[i];
        int p = pred[i] < 0 ? kOutlier : pred[i];
        if (mode == OutlierMode::Exclude && (t == kOutlier || p == kOutlier)) continue;
        table[{t, p}] += 1.0;
        rows[t] += 1.0;
        cols[p] += 1.0;
        n += 1.0;
    }
    if (n < 2.0) return 1.0;
    double index = 0.0, sum_a = 0.0, sum_b = 0.0;
    for (const auto& [key, v] : table) index += comb2(v);
    for (const auto& [key, v] : rows) sum_a += comb2(v);
    for (const auto& [key, v] : cols) sum_b += comb2(v);
    const double expected = sum_a * sum_b / comb2(n);
    const double max_index = 0.5 * (sum_a + sum_b);
    if (max_index == expected) return 1.0;  // both partitions trivial (all singletons or one block)
    return (index - expected) / (max_index - expected);
}

RunSummary summarize_run(const Labeling& truth, const Labeling& pred, const std::optional<std::vector<bool>>& injected_mask,
                         OutlierMode mode) {
    if (truth.size() != pred.size()) throw ValidationError("summarize_run: label lengths differ");
    if (injected_mask && injected_mask->size() != truth.size())
        throw ValidationError("summarize_run: injected mask length differs from labels");

    RunSummary s;
    Labeling t, p;
    std::size_t injected = 0, injected_kept = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (injected_mask && (*injected_mask)[i]) {
            ++injected;
            if (pred[i] >= 0) ++injected_kept;
            continue;
        }
        t.labels.push_back(truth[i]);
        p.labels.push_back(pred[i]);
    }
    s.ari = adjusted_rand_index(t, p, mode);
    s.detected_emitters = static_cast<int>(pred.cluster_count());
    s.outlier_fraction =
        pred.size() == 0 ? 0.0 : static_cast<double>(pred.outlier_count()) / static_cast<double>(pred.size());
    s.injected_in_clusters = injected == 0 ? 0.0 : static_cast<double>(injected_kept) / static_cast<double>(injected);
    return s;
}

}  // namespace deint::metrics
