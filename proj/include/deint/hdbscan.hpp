#pragma once

// HDBSCAN: core distances, MST of the mutual-reachability graph, condensed
// cluster tree and excess-of-mass cluster selection.
//
// minPts plays both roles: k of the core distance (self excluded, so the
// (minPts-1)-th neighbour) and the minimum cluster size. The MST uses Prim on
// the implicit dense graph, O(N^2) time and O(N) memory. Ties resolve to the
// lowest index.

#include <cstddef>
#include <vector>

#include "deint/pdw.hpp"

namespace deint::hdbscan {

struct MstEdge {
    std::size_t a = 0;
    std::size_t b = 0;
    double weight = 0.0;  // mutual reachability distance
};

/// Euclidean distance from each point to its (minPts-1)-th nearest neighbour.
std::vector<double> core_distances(const FeatureMatrix& features, std::size_t min_pts);

/// N-1 edges in the order Prim adds them (starting from point 0).
std::vector<MstEdge> mutual_reachability_mst(const FeatureMatrix& features, std::size_t min_pts);

/// Same, reusing precomputed core distances.
std::vector<MstEdge> mutual_reachability_mst(const FeatureMatrix& features, const std::vector<double>& core);

struct CondensedCluster {
    int parent = -1;             // -1 for the root
    double birth_lambda = 0.0;   // lambda = 1 / distance
    double death_lambda = 0.0;   // lambda at which it split, or its last point left
    double stability = 0.0;
    std::vector<int> children;
    /// Points that leave this cluster directly (not through a child cluster), with their lambda.
    std::vector<std::size_t> points;
    std::vector<double> point_lambdas;
    bool selected = false;
};

struct CondensedTree {
    std::size_t point_count = 0;
    std::size_t min_cluster_size = 0;
    std::vector<CondensedCluster> clusters;  // clusters[0] is the root; children have larger ids

    /// All points in the subtree rooted at `id`.
    std::vector<std::size_t> members(int id) const;
};

/// Condensed tree from MST edges; stabilities filled, nothing selected.
CondensedTree condense(const std::vector<MstEdge>& mst, std::size_t point_count, std::size_t min_cluster_size);

/// Excess-of-mass selection (root excluded). Marks `selected`, returns selected ids.
std::vector<int> select_eom(CondensedTree& tree);

struct Result {
    Labeling labels;  // canonical, kOutlier for noise
    CondensedTree tree;
};

Result cluster_with_tree(const FeatureMatrix& features, std::size_t min_pts);

/// Labels from EOM extraction; points outside every selected cluster are kOutlier.
Labeling cluster(const FeatureMatrix& features, std::size_t min_pts);

}  // namespace deint::hdbscan
