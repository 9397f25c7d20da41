#pragma once

// IHACOT: 3-D (toa, freq, pw) HDBSCAN, single-linkage pre-aggregation of the
// cluster means pruned by tests on pulse-level frequency and pulse width, then
// the HACOT agglomeration stages on the pre-aggregated groups.

#include <cstddef>
#include <optional>
#include <vector>

#include "deint/hacot.hpp"

namespace deint::ihacot {

struct ClusterSummary {
    int id = 0;
    double f_mean = 0.0;   // MHz
    double pw_mean = 0.0;  // ns
    std::size_t size = 0;
};

hacot::ClusterSet cluster_3d(const PulseTrain& train, std::size_t min_pts);

/// Means of raw frequency and pulse width, in cluster-id order.
std::vector<ClusterSummary> cluster_means(const hacot::ClusterSet& clusters, const PulseTrain& train);

struct PreAggregation {
    hacot::ClusterSet groups;  // ids 0..G-1; outliers carried over
    hacot::Dendrogram dendrogram;
    std::vector<double> pvalues;  // per merge, min of the frequency and pulse-width tests
    double alpha = 0.0;
};

/// Single-linkage HAC on z-scored (f_mean, pw_mean) with equal distances resolved to the smallest
/// node pair, pruned so that a merge survives only if both feature tests give p >= alpha.
PreAggregation pre_aggregate(const std::vector<ClusterSummary>& summaries, const hacot::ClusterSet& clusters,
                             const PulseTrain& train, stats::TestKind test, std::optional<double> alpha = std::nullopt);

struct IhacotConfig {
    std::size_t min_pts = 25;  // 3-D HDBSCAN
    std::size_t lambda = 100;
    std::optional<double> alpha;
    stats::TestKind test = stats::TestKind::KolmogorovSmirnov;
    std::size_t temporal_min_pts = 25;
    stats::TestKind pre_test = stats::TestKind::KolmogorovSmirnov;
    std::optional<double> pre_alpha;

    hacot::HacotConfig stages() const;
};

void validate(const IhacotConfig& cfg);

struct Report {
    hacot::Report hacot;  // labels and the OT stage log
    std::size_t clusters_3d = 0;
    std::size_t pre_groups = 0;
    double pre_alpha = 0.0;
};

Report run_ihacot_report(const PulseTrain& train, const IhacotConfig& cfg);
Labeling run_ihacot(const PulseTrain& train, const IhacotConfig& cfg);

}  // namespace deint::ihacot
