#include "deint/ihacot.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <tuple>

#include "deint/error.hpp"
#include "deint/hdbscan.hpp"

namespace deint::ihacot {

hacot::ClusterSet cluster_3d(const PulseTrain& train, std::size_t min_pts) {
    if (train.empty()) throw ValidationError("cluster_3d needs a non-empty train");
    if (min_pts < 2) throw ValidationError("minPts must be >= 2");
    const std::array<Feature, 3> cols{Feature::Toa, Feature::Freq, Feature::Pw};
    const FeatureMatrix fm = quantile_normalize(feature_matrix(train, cols));
    return hacot::ClusterSet::from_initial_clustering(hdbscan::cluster(fm, std::min(min_pts, train.size())));
}

std::vector<ClusterSummary> cluster_means(const hacot::ClusterSet& clusters, const PulseTrain& train) {
    if (clusters.clusters.empty()) throw ValidationError("cluster_means needs at least one cluster");
    std::vector<ClusterSummary> out;
    for (const auto& [id, members] : clusters.clusters) {
        if (members.empty()) throw ValidationError("cluster " + std::to_string(id) + " is empty");
        double f = 0.0, pw = 0.0;
        for (std::size_t i : members) {
            f += train[i].freq;
            pw += train[i].pw;
        }
        const double n = static_cast<double>(members.size());
        out.push_back({id, f / n, pw / n, members.size()});
    }
    return out;
}

namespace {

std::vector<double> zscore(std::vector<double> v) {
    const double n = static_cast<double>(v.size());
    const double m = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    const double sd = std::sqrt(ss / n);
    for (double& x : v) x = sd > 0.0 ? (x - m) / sd : 0.0;
    return v;
}

int find_root(std::vector<int>& parent, int v) {
    while (parent[static_cast<std::size_t>(v)] != v) {
        parent[static_cast<std::size_t>(v)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(v)])];
        v = parent[static_cast<std::size_t>(v)];
    }
    return v;
}

}  // namespace

PreAggregation pre_aggregate(const std::vector<ClusterSummary>& summaries, const hacot::ClusterSet& clusters,
                             const PulseTrain& train, stats::TestKind test, std::optional<double> alpha) {
    if (summaries.size() < 1) throw ValidationError("pre_aggregate needs at least one cluster summary");
    if (alpha && !(*alpha > 0.0 && *alpha < 1.0)) throw ValidationError("pre-aggregation alpha must be in (0,1)");
    const std::size_t p = summaries.size();

    PreAggregation out;
    auto& dend = out.dendrogram;
    for (const auto& s : summaries) {
        const auto it = clusters.clusters.find(s.id);
        if (it == clusters.clusters.end()) throw ValidationError("summary refers to unknown cluster " + std::to_string(s.id));
        dend.leaf_ids.push_back(s.id);
        dend.leaf_members.push_back(it->second);
    }

    std::vector<double> f, pw;
    for (const auto& s : summaries) {
        f.push_back(s.f_mean);
        pw.push_back(s.pw_mean);
    }
    f = zscore(std::move(f));
    pw = zscore(std::move(pw));

    // single linkage = Kruskal order over all pairs
    std::vector<std::tuple<double, std::size_t, std::size_t>> edges;
    edges.reserve(p * (p - 1) / 2);
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = i + 1; j < p; ++j) {
            const double df = f[i] - f[j], dp = pw[i] - pw[j];
            edges.emplace_back(std::sqrt(df * df + dp * dp), i, j);
        }
    std::sort(edges.begin(), edges.end());

    std::vector<int> uf(2 * p, 0);
    std::iota(uf.begin(), uf.end(), 0);
    std::vector<int> root_node(2 * p);
    std::iota(root_node.begin(), root_node.end(), 0);
    for (const auto& [d, i, j] : edges) {
        const int ri = find_root(uf, static_cast<int>(i)), rj = find_root(uf, static_cast<int>(j));
        if (ri == rj) continue;
        int a = root_node[static_cast<std::size_t>(ri)], b = root_node[static_cast<std::size_t>(rj)];
        if (a > b) std::swap(a, b);
        const int node = static_cast<int>(p + dend.merges.size());
        dend.merges.push_back({a, b, d, node});
        uf[static_cast<std::size_t>(rj)] = ri;
        root_node[static_cast<std::size_t>(ri)] = node;
        if (dend.merges.size() + 1 == p) break;
    }

    const auto tf = hacot::test_merges(dend, test, [&](std::size_t i) { return train[i].freq; });
    const auto tp = hacot::test_merges(dend, test, [&](std::size_t i) { return train[i].pw; });
    for (std::size_t k = 0; k < tf.size(); ++k) out.pvalues.push_back(std::min(tf[k].p_value, tp[k].p_value));
    out.alpha = alpha ? *alpha : hacot::select_alpha(out.pvalues);

    const auto pr = hacot::prune(dend, out.pvalues, out.alpha);
    int id = 0;
    for (int v : pr.final_nodes) out.groups.clusters[id++] = dend.members(v);
    out.groups.outliers = clusters.outliers;
    return out;
}

hacot::HacotConfig IhacotConfig::stages() const {
    hacot::HacotConfig c;
    c.min_pts = min_pts;
    c.lambda = lambda;
    c.alpha = alpha;
    c.test = test;
    c.temporal_min_pts = temporal_min_pts;
    return c;
}

void validate(const IhacotConfig& cfg) {
    hacot::validate(cfg.stages());
    if (cfg.pre_alpha && !(*cfg.pre_alpha > 0.0 && *cfg.pre_alpha < 1.0))
        throw ValidationError("pre-aggregation alpha must be in (0,1)");
}

Report run_ihacot_report(const PulseTrain& train, const IhacotConfig& cfg) {
    validate(cfg);
    if (train.empty()) throw ValidationError("run_ihacot needs a non-empty train");
    Report report;
    const auto initial = cluster_3d(train, cfg.min_pts);
    report.clusters_3d = initial.clusters.size();
    if (initial.clusters.empty()) throw PipelineError("3-D clustering found no clusters");
    const auto pre = pre_aggregate(cluster_means(initial, train), initial, train, cfg.pre_test, cfg.pre_alpha);
    report.pre_groups = pre.groups.clusters.size();
    report.pre_alpha = pre.alpha;
    report.hacot = hacot::agglomerate(train, pre.groups, cfg.stages());
    return report;
}

Labeling run_ihacot(const PulseTrain& train, const IhacotConfig& cfg) { return run_ihacot_report(train, cfg).hacot.labels; }

}  // namespace deint::ihacot
