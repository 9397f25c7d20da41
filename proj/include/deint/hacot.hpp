#pragma once

// HACOT: 2-D (freq, pw) HDBSCAN separation, agglomeration of the significant
// clusters by the W1 distance between their TOA measures, pruning of the
// dendrogram with two-sample tests on raw TOAs, and maximum-likelihood
// assignment of the small (excluded) clusters through per-group TOA KDEs.

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "deint/pdw.hpp"
#include "deint/stats.hpp"

namespace deint::hacot {

/// Cluster id -> pulse indices, plus the pulses labelled as outliers.
struct ClusterSet {
    std::map<int, std::vector<std::size_t>> clusters;
    std::vector<std::size_t> outliers;

    std::size_t pulse_count() const;
    /// Labels in cluster-id order, then canonicalised.
    Labeling to_labeling(std::size_t n) const;
    static ClusterSet from_labeling(const Labeling& labels);
    /// As from_labeling, but a labeling with no cluster at all becomes one cluster holding every
    /// pulse: EOM never selects the root, so a train with no density split comes back as pure noise.
    static ClusterSet from_initial_clustering(const Labeling& labels);
};

struct SignificanceSplit {
    ClusterSet significant;  // D: clusters with at least lambda pulses, outliers kept here
    ClusterSet excluded;     // E: the rest, no outliers
};

/// Throws PipelineError when no cluster reaches lambda pulses.
SignificanceSplit significance_split(const ClusterSet& clusters, std::size_t lambda);

/// Binary merge tree. Nodes 0..L-1 are the leaves (leaf_ids[i] is the originating cluster id);
/// merge k creates node L + k.
struct Dendrogram {
    struct Merge {
        int left = 0;
        int right = 0;
        double distance = 0.0;
        int node = 0;
    };

    std::vector<int> leaf_ids;
    std::vector<std::vector<std::size_t>> leaf_members;
    std::vector<Merge> merges;

    std::size_t leaf_count() const noexcept { return leaf_ids.size(); }
    std::size_t node_count() const noexcept { return leaf_ids.size() + merges.size(); }
    /// Children of an internal node, {-1, -1} for a leaf.
    std::pair<int, int> children(int node) const;
    /// Pulse indices under a node, sorted.
    std::vector<std::size_t> members(int node) const;
    /// Parent of every node; -1 for roots.
    std::vector<int> parents() const;
};

/// Agglomerates the clusters of D by smallest W1 distance between histogram measures of their
/// level-weighted TOAs. Merged nodes get a measure rebuilt from their union of pulses. Equal
/// distances resolve to the lexicographically smallest node pair.
Dendrogram build_ot_dendrogram(const ClusterSet& significant, const PulseTrain& train);

/// Two-sample test between the children of every merge, in merge order.
/// `sample` maps a pulse to the tested value.
template <class Sample>
std::vector<stats::TestResult> test_merges(const Dendrogram& dend, stats::TestKind kind, Sample&& sample);

/// TOA version of test_merges.
std::vector<stats::TestResult> test_merges_toa(const Dendrogram& dend, const PulseTrain& train, stats::TestKind kind);

struct Pruning {
    std::vector<int> final_nodes;           // sorted by smallest member pulse
    std::vector<bool> accepted;             // per merge
    std::vector<bool> tested;               // false when a child was already blocked
};

/// Walks merges in order. A merge with a blocked child is blocked without testing; a tested merge
/// with p < alpha is blocked; otherwise it is accepted. Final groups are the maximal accepted subtrees.
Pruning prune(const Dendrogram& dend, std::span<const double> pvalues, double alpha);

/// Test and prune on raw TOAs; returns the final groups (ids 0..G-1) with no outliers.
ClusterSet prune_dendrogram(const Dendrogram& dend, const PulseTrain& train, double alpha, stats::TestKind kind);

/// Confidence level from merge p-values; 0.01 when fewer than three are available.
double select_alpha(std::span<const double> pvalues);

inline constexpr double kFallbackAlpha = 0.01;

/// Adds every excluded cluster to the final group whose TOA KDE gives it the largest log-likelihood.
/// The KDE bandwidth comes from Scott's rule on the mean variance of the group's temporal sub-clusters.
ClusterSet assign_excluded(const ClusterSet& final_groups, const ClusterSet& excluded, const PulseTrain& train,
                           std::size_t temporal_min_pts);

/// Bandwidth of a group's TOA KDE (exposed for tests).
double group_bandwidth(std::span<const double> toas, std::size_t temporal_min_pts);

struct HacotConfig {
    std::size_t min_pts = 100;
    std::size_t lambda = 100;
    std::optional<double> alpha;
    stats::TestKind test = stats::TestKind::KolmogorovSmirnov;
    std::size_t temporal_min_pts = 25;
};

void validate(const HacotConfig& cfg);

struct MergeRecord {
    int left = 0;
    int right = 0;
    int node = 0;
    double distance = 0.0;
    double p_value = 1.0;
    bool tested = false;
    bool accepted = false;
};

struct Report {
    Labeling labels;
    std::size_t initial_clusters = 0;
    std::size_t significant_clusters = 0;
    std::size_t excluded_clusters = 0;
    std::size_t final_groups = 0;
    double alpha = 0.0;
    std::vector<MergeRecord> merges;
};

/// Stages after the initial clustering, shared with IHACOT: significance split, OT dendrogram,
/// alpha selection, pruning and assignment of excluded clusters.
Report agglomerate(const PulseTrain& train, const ClusterSet& initial, const HacotConfig& cfg);

Report run_hacot_report(const PulseTrain& train, const HacotConfig& cfg);
Labeling run_hacot(const PulseTrain& train, const HacotConfig& cfg);

// ---------------------------------------------------------------------------

template <class Sample>
std::vector<stats::TestResult> test_merges(const Dendrogram& dend, stats::TestKind kind, Sample&& sample) {
    std::vector<stats::TestResult> out;
    out.reserve(dend.merges.size());
    std::vector<double> x, y;
    for (const auto& m : dend.merges) {
        x.clear();
        y.clear();
        for (std::size_t i : dend.members(m.left)) x.push_back(sample(i));
        for (std::size_t i : dend.members(m.right)) y.push_back(sample(i));
        out.push_back(stats::two_sample(kind, x, y));
    }
    return out;
}

}  // namespace deint::hacot
