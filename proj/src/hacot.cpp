#include "deint/hacot.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "deint/error.hpp"
#include "deint/hdbscan.hpp"
#include "deint/transport.hpp"

namespace deint::hacot {

std::size_t ClusterSet::pulse_count() const {
    std::size_t n = outliers.size();
    for (const auto& [id, members] : clusters) n += members.size();
    return n;
}

Labeling ClusterSet::to_labeling(std::size_t n) const {
    Labeling out;
    out.labels.assign(n, kOutlier);
    for (const auto& [id, members] : clusters) {
        for (std::size_t i : members) {
            if (i >= n) throw ValidationError("cluster member index out of range");
            out.labels[i] = id;
        }
    }
    return canonicalize(out);
}

ClusterSet ClusterSet::from_labeling(const Labeling& labels) {
    ClusterSet out;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0) out.outliers.push_back(i);
        else out.clusters[labels[i]].push_back(i);
    }
    return out;
}

ClusterSet ClusterSet::from_initial_clustering(const Labeling& labels) {
    ClusterSet out = from_labeling(labels);
    if (out.clusters.empty() && !out.outliers.empty()) {
        out.clusters[0] = std::move(out.outliers);
        out.outliers.clear();
    }
    return out;
}

SignificanceSplit significance_split(const ClusterSet& clusters, std::size_t lambda) {
    SignificanceSplit out;
    out.significant.outliers = clusters.outliers;
    for (const auto& [id, members] : clusters.clusters) {
        if (members.size() >= lambda) out.significant.clusters[id] = members;
        else out.excluded.clusters[id] = members;
    }
    if (out.significant.clusters.empty())
        throw PipelineError("no significant clusters (none reaches " + std::to_string(lambda) + " pulses)");
    return out;
}

// ---------------------------------------------------------------------------
// Dendrogram

std::pair<int, int> Dendrogram::children(int node) const {
    const int l = static_cast<int>(leaf_ids.size());
    if (node < l) return {-1, -1};
    const auto& m = merges.at(static_cast<std::size_t>(node - l));
    return {m.left, m.right};
}

std::vector<std::size_t> Dendrogram::members(int node) const {
    std::vector<std::size_t> out;
    std::vector<int> stack{node};
    const int l = static_cast<int>(leaf_ids.size());
    while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        if (v < l) {
            const auto& m = leaf_members.at(static_cast<std::size_t>(v));
            out.insert(out.end(), m.begin(), m.end());
        } else {
            const auto [a, b] = children(v);
            stack.push_back(a);
            stack.push_back(b);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<int> Dendrogram::parents() const {
    std::vector<int> parent(node_count(), -1);
    for (const auto& m : merges) {
        parent[static_cast<std::size_t>(m.left)] = m.node;
        parent[static_cast<std::size_t>(m.right)] = m.node;
    }
    return parent;
}

namespace {

transport::DiscreteMeasure measure_of(const std::vector<std::size_t>& members, const PulseTrain& train) {
    std::vector<double> toas, levels;
    toas.reserve(members.size());
    levels.reserve(members.size());
    for (std::size_t i : members) {
        toas.push_back(train[i].toa);
        levels.push_back(train[i].level);
    }
    return transport::histogram_measure(transport::cluster_measure(toas, levels));
}

}  // namespace

Dendrogram build_ot_dendrogram(const ClusterSet& significant, const PulseTrain& train) {
    Dendrogram dend;
    for (const auto& [id, members] : significant.clusters) {
        if (members.empty()) throw ValidationError("cluster " + std::to_string(id) + " is empty");
        for (std::size_t i : members)
            if (i >= train.size()) throw ValidationError("cluster member index out of range");
        dend.leaf_ids.push_back(id);
        dend.leaf_members.push_back(members);
    }
    const std::size_t leaves = dend.leaf_ids.size();
    if (leaves < 2) return dend;

    const std::size_t total = 2 * leaves - 1;
    std::vector<transport::DiscreteMeasure> measures(total);
    std::vector<std::vector<std::size_t>> members(total);
    for (std::size_t i = 0; i < leaves; ++i) {
        members[i] = dend.leaf_members[i];
        std::sort(members[i].begin(), members[i].end());
        measures[i] = measure_of(members[i], train);
    }
    std::vector<std::vector<double>> dist(total, std::vector<double>(total, 0.0));
    for (std::size_t i = 0; i < leaves; ++i)
        for (std::size_t j = i + 1; j < leaves; ++j)
            dist[i][j] = dist[j][i] = transport::wasserstein_1d(measures[i], measures[j]);

    std::vector<int> active(leaves);
    for (std::size_t i = 0; i < leaves; ++i) active[i] = static_cast<int>(i);

    while (active.size() > 1) {
        // active stays sorted, so the first strict minimum is the lexicographically smallest pair
        double best = std::numeric_limits<double>::infinity();
        std::size_t bi = 0, bj = 1;
        for (std::size_t i = 0; i < active.size(); ++i) {
            for (std::size_t j = i + 1; j < active.size(); ++j) {
                const double d = dist[static_cast<std::size_t>(active[i])][static_cast<std::size_t>(active[j])];
                if (d < best) {
                    best = d;
                    bi = i;
                    bj = j;
                }
            }
        }
        const int a = active[bi], b = active[bj];
        const int node = static_cast<int>(leaves + dend.merges.size());
        dend.merges.push_back({a, b, best, node});

        auto& merged = members[static_cast<std::size_t>(node)];
        const auto& ma = members[static_cast<std::size_t>(a)];
        const auto& mb = members[static_cast<std::size_t>(b)];
        merged.resize(ma.size() + mb.size());
        std::merge(ma.begin(), ma.end(), mb.begin(), mb.end(), merged.begin());
        measures[static_cast<std::size_t>(node)] = measure_of(merged, train);

        active.erase(active.begin() + static_cast<std::ptrdiff_t>(bj));
        active.erase(active.begin() + static_cast<std::ptrdiff_t>(bi));
        for (int v : active) {
            const double d = transport::wasserstein_1d(measures[static_cast<std::size_t>(node)],
                                                       measures[static_cast<std::size_t>(v)]);
            dist[static_cast<std::size_t>(node)][static_cast<std::size_t>(v)] = d;
            dist[static_cast<std::size_t>(v)][static_cast<std::size_t>(node)] = d;
        }
        active.push_back(node);
    }
    return dend;
}

std::vector<stats::TestResult> test_merges_toa(const Dendrogram& dend, const PulseTrain& train, stats::TestKind kind) {
    return test_merges(dend, kind, [&](std::size_t i) { return train[i].toa; });
}

Pruning prune(const Dendrogram& dend, std::span<const double> pvalues, double alpha) {
    if (pvalues.size() != dend.merges.size()) throw ValidationError("prune needs one p-value per merge");
    Pruning out;
    out.accepted.assign(dend.merges.size(), false);
    out.tested.assign(dend.merges.size(), false);
    std::vector<bool> blocked(dend.node_count(), false);
    for (std::size_t k = 0; k < dend.merges.size(); ++k) {
        const auto& m = dend.merges[k];
        const auto node = static_cast<std::size_t>(m.node);
        if (blocked[static_cast<std::size_t>(m.left)] || blocked[static_cast<std::size_t>(m.right)]) {
            blocked[node] = true;
            continue;
        }
        out.tested[k] = true;
        if (pvalues[k] < alpha) blocked[node] = true;
        else out.accepted[k] = true;
    }
    const auto parent = dend.parents();
    for (std::size_t v = 0; v < dend.node_count(); ++v) {
        if (blocked[v]) continue;
        if (parent[v] < 0 || blocked[static_cast<std::size_t>(parent[v])]) out.final_nodes.push_back(static_cast<int>(v));
    }
    // order groups by their first pulse so ids do not depend on node numbering
    std::vector<std::size_t> first(dend.node_count(), 0);
    for (int v : out.final_nodes) first[static_cast<std::size_t>(v)] = dend.members(v).front();
    std::sort(out.final_nodes.begin(), out.final_nodes.end(),
              [&](int a, int b) { return first[static_cast<std::size_t>(a)] < first[static_cast<std::size_t>(b)]; });
    return out;
}

ClusterSet prune_dendrogram(const Dendrogram& dend, const PulseTrain& train, double alpha, stats::TestKind kind) {
    const auto tests = test_merges_toa(dend, train, kind);
    std::vector<double> p;
    for (const auto& t : tests) p.push_back(t.p_value);
    const auto pr = prune(dend, p, alpha);
    ClusterSet out;
    int id = 0;
    for (int v : pr.final_nodes) out.clusters[id++] = dend.members(v);
    return out;
}

double select_alpha(std::span<const double> pvalues) {
    if (pvalues.size() < 3) return kFallbackAlpha;
    return stats::pvalue_threshold(pvalues);
}

// ---------------------------------------------------------------------------
// Excluded clusters

double group_bandwidth(std::span<const double> toas, std::size_t temporal_min_pts) {
    if (toas.empty()) throw ValidationError("group_bandwidth needs at least one toa");
    const std::size_t n = toas.size();
    double sigma = 0.0;
    if (temporal_min_pts >= 2 && n >= temporal_min_pts && n >= 2) {
        FeatureMatrix fm({"toa"}, {std::vector<double>(toas.begin(), toas.end())});
        const Labeling sub = hdbscan::cluster(fm, temporal_min_pts);
        std::map<int, std::vector<double>> groups;
        for (std::size_t i = 0; i < n; ++i)
            if (sub[i] >= 0) groups[sub[i]].push_back(toas[i]);
        double var_sum = 0.0;
        for (const auto& [id, g] : groups) var_sum += stats::variance(g);
        if (!groups.empty()) sigma = std::sqrt(var_sum / static_cast<double>(groups.size()));
    }
    if (!(sigma > 0.0)) sigma = std::sqrt(stats::variance(toas));
    if (!(sigma > 0.0)) sigma = 1.0;  // every toa identical; any positive width gives the same argmax
    return stats::scott_bandwidth(sigma, n);
}

ClusterSet assign_excluded(const ClusterSet& final_groups, const ClusterSet& excluded, const PulseTrain& train,
                           std::size_t temporal_min_pts) {
    if (final_groups.clusters.empty()) throw ValidationError("assign_excluded needs at least one final group");
    ClusterSet out = final_groups;
    if (excluded.clusters.empty()) return out;

    std::vector<int> ids;
    std::vector<stats::KdeModel> models;
    for (const auto& [id, members] : final_groups.clusters) {
        std::vector<double> toas;
        toas.reserve(members.size());
        for (std::size_t i : members) toas.push_back(train[i].toa);
        const double h = group_bandwidth(toas, temporal_min_pts);
        ids.push_back(id);
        models.emplace_back(std::move(toas), h);
    }
    for (const auto& [eid, members] : excluded.clusters) {
        std::vector<double> toas;
        for (std::size_t i : members) toas.push_back(train[i].toa);
        double best = -std::numeric_limits<double>::infinity();
        std::size_t arg = 0;
        for (std::size_t g = 0; g < models.size(); ++g) {
            double ll = 0.0;
            for (double v : stats::kde_log_density(models[g], toas)) ll += v;
            if (ll > best) {
                best = ll;
                arg = g;
            }
        }
        auto& target = out.clusters[ids[arg]];
        target.insert(target.end(), members.begin(), members.end());
    }
    for (auto& [id, members] : out.clusters) std::sort(members.begin(), members.end());
    return out;
}

// ---------------------------------------------------------------------------
// Pipeline

void validate(const HacotConfig& cfg) {
    if (cfg.min_pts < 2) throw ValidationError("minPts must be >= 2");
    if (cfg.lambda < 2) throw ValidationError("lambda must be >= 2");
    if (cfg.alpha && !(*cfg.alpha > 0.0 && *cfg.alpha < 1.0)) throw ValidationError("alpha must be in (0,1)");
    if (cfg.temporal_min_pts < 2) throw ValidationError("temporal minPts must be >= 2");
}

Report agglomerate(const PulseTrain& train, const ClusterSet& initial, const HacotConfig& cfg) {
    validate(cfg);
    Report report;
    report.initial_clusters = initial.clusters.size();
    const auto split = significance_split(initial, cfg.lambda);
    report.significant_clusters = split.significant.clusters.size();
    report.excluded_clusters = split.excluded.clusters.size();

    const Dendrogram dend = build_ot_dendrogram(split.significant, train);
    const auto tests = test_merges_toa(dend, train, cfg.test);
    std::vector<double> p;
    for (const auto& t : tests) p.push_back(t.p_value);
    report.alpha = cfg.alpha ? *cfg.alpha : select_alpha(p);
    const auto pr = prune(dend, p, report.alpha);

    for (std::size_t k = 0; k < dend.merges.size(); ++k) {
        const auto& m = dend.merges[k];
        report.merges.push_back({m.left, m.right, m.node, m.distance, p[k], static_cast<bool>(pr.tested[k]),
                                 static_cast<bool>(pr.accepted[k])});
    }

    ClusterSet final_groups;
    int id = 0;
    for (int v : pr.final_nodes) final_groups.clusters[id++] = dend.members(v);
    report.final_groups = final_groups.clusters.size();

    ClusterSet assigned = assign_excluded(final_groups, split.excluded, train, cfg.temporal_min_pts);
    assigned.outliers = initial.outliers;
    report.labels = assigned.to_labeling(train.size());
    return report;
}

Report run_hacot_report(const PulseTrain& train, const HacotConfig& cfg) {
    validate(cfg);
    if (train.empty()) throw ValidationError("run_hacot needs a non-empty train");
    const std::array<Feature, 2> cols{Feature::Freq, Feature::Pw};
    const FeatureMatrix fm = quantile_normalize(feature_matrix(train, cols));
    const Labeling initial = hdbscan::cluster(fm, std::min(cfg.min_pts, train.size()));
    return agglomerate(train, ClusterSet::from_initial_clustering(initial), cfg);
}

Labeling run_hacot(const PulseTrain& train, const HacotConfig& cfg) { return run_hacot_report(train, cfg).labels; }

}  // namespace deint::hacot
