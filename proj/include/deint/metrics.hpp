#pragma once

#include <optional>
#include <vector>

#include "deint/pdw.hpp"

namespace deint::metrics {

enum class OutlierMode {
    AsClass,  // kOutlier is one more class in either labeling
    Exclude,  // pulses labelled kOutlier in either labeling are dropped first
};

/// Hubert-Arabie adjusted Rand index. 1.0 when both partitions are trivial and identical.
double adjusted_rand_index(const Labeling& truth, const Labeling& pred, OutlierMode mode = OutlierMode::AsClass);

struct RunSummary {
    double ari = 0.0;
    int detected_emitters = 0;
    double outlier_fraction = 0.0;
    /// Share of injected pulses that ended up inside a cluster.
    double injected_in_clusters = 0.0;
};

/// ARI is computed on pulses that were not injected (mask false).
RunSummary summarize_run(const Labeling& truth, const Labeling& pred,
                         const std::optional<std::vector<bool>>& injected_mask = std::nullopt,
                         OutlierMode mode = OutlierMode::AsClass);

}  // namespace deint::metrics
