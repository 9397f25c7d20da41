#include "deint/hdbscan.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "deint/error.hpp"
#include "deint/simd/kernels.hpp"

namespace deint::hdbscan {
namespace {

struct ColumnPoints {
    std::vector<const double*> ptrs;
    simd::PointsView view;

    explicit ColumnPoints(const FeatureMatrix& f) {
        for (std::size_t c = 0; c < f.cols(); ++c) ptrs.push_back(f.column(c).data());
        view = simd::PointsView{ptrs.data(), ptrs.size(), f.rows()};
    }

    void gather(std::size_t i, double* out) const {
        for (std::size_t c = 0; c < ptrs.size(); ++c) out[c] = ptrs[c][i];
    }
};

void check_features(const FeatureMatrix& features) {
    if (features.cols() == 0) throw ValidationError("hdbscan needs at least one feature column");
}

std::vector<double> core_distances_squared(const FeatureMatrix& features, std::size_t min_pts) {
    check_features(features);
    if (min_pts < 2) throw ValidationError("minPts must be >= 2");
    const std::size_t n = features.rows();
    if (n < min_pts)
        throw ValidationError("hdbscan needs at least minPts=" + std::to_string(min_pts) + " points, got " +
                              std::to_string(n));

    const auto& kernels = simd::active_kernels();
    ColumnPoints pts(features);
    std::vector<double> query(features.cols());
    std::vector<double> dist(n);
    // the point itself sits at distance 0, so the (minPts-1)-th neighbour is the minPts-th smallest
    const std::size_t k = min_pts;
    std::vector<double> smallest;
    smallest.reserve(k + 1);
    std::vector<double> core2(n);
    for (std::size_t i = 0; i < n; ++i) {
        pts.gather(i, query.data());
        kernels.squared_distances(pts.view, query.data(), dist.data());
        smallest.assign(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k));
        std::sort(smallest.begin(), smallest.end());
        double worst = smallest.back();
        for (std::size_t j = k; j < n; ++j) {
            const double d = dist[j];
            if (d < worst) {
                smallest.insert(std::upper_bound(smallest.begin(), smallest.end(), d), d);
                smallest.pop_back();
                worst = smallest.back();
            }
        }
        core2[i] = worst;
    }
    return core2;
}

double lambda_of(double distance, double cap) { return distance > 0.0 ? std::min(1.0 / distance, cap) : cap; }

}  // namespace

std::vector<double> core_distances(const FeatureMatrix& features, std::size_t min_pts) {
    auto core = core_distances_squared(features, min_pts);
    for (auto& c : core) c = std::sqrt(c);
    return core;
}

std::vector<MstEdge> mutual_reachability_mst(const FeatureMatrix& features, const std::vector<double>& core) {
    check_features(features);
    const std::size_t n = features.rows();
    if (n < 2) throw ValidationError("mutual_reachability_mst needs at least 2 points");
    if (core.size() != n) throw ValidationError("core distance count does not match point count");

    const auto& kernels = simd::active_kernels();
    ColumnPoints pts(features);
    const double inf = std::numeric_limits<double>::infinity();

    std::vector<double> core2(n), core2_active(n), best(n, inf);
    for (std::size_t i = 0; i < n; ++i) core2[i] = core2_active[i] = core[i] * core[i];
    std::vector<std::int32_t> from(n, -1);
    std::vector<double> query(features.cols());

    std::vector<MstEdge> edges;
    edges.reserve(n - 1);
    std::size_t u = 0;
    core2_active[u] = inf;
    for (std::size_t step = 1; step < n; ++step) {
        pts.gather(u, query.data());
        const std::size_t v = kernels.prim_relax(pts.view, query.data(), core2[u], core2_active.data(), best.data(),
                                                 from.data(), static_cast<std::int32_t>(u));
        if (v >= n) throw Error("mutual_reachability_mst: graph disconnected (non-finite features?)");
        edges.push_back(MstEdge{static_cast<std::size_t>(from[v]), v, std::sqrt(best[v])});
        core2_active[v] = inf;
        best[v] = inf;
        u = v;
    }
    return edges;
}

std::vector<MstEdge> mutual_reachability_mst(const FeatureMatrix& features, std::size_t min_pts) {
    const std::size_t n = features.rows();
    if (n < 2) throw ValidationError("mutual_reachability_mst needs at least 2 points");
    // with fewer points than minPts the core distance degenerates to the farthest neighbour
    const auto core = core_distances(features, std::min(min_pts, n));
    return mutual_reachability_mst(features, core);
}

// ---------------------------------------------------------------------------

std::vector<std::size_t> CondensedTree::members(int id) const {
    std::vector<std::size_t> out;
    std::vector<int> stack{id};
    while (!stack.empty()) {
        const int c = stack.back();
        stack.pop_back();
        const auto& node = clusters[static_cast<std::size_t>(c)];
        out.insert(out.end(), node.points.begin(), node.points.end());
        for (int ch : node.children) stack.push_back(ch);
    }
    std::sort(out.begin(), out.end());
    return out;
}

CondensedTree condense(const std::vector<MstEdge>& mst, std::size_t point_count, std::size_t min_cluster_size) {
    if (min_cluster_size < 2) throw ValidationError("min cluster size must be >= 2");
    const std::size_t n = point_count;
    if (mst.size() + 1 != n) throw ValidationError("MST must have point_count - 1 edges");

    CondensedTree tree;
    tree.point_count = n;
    tree.min_cluster_size = min_cluster_size;
    tree.clusters.emplace_back();
    if (n == 1) {
        tree.clusters[0].points.push_back(0);
        tree.clusters[0].point_lambdas.push_back(0.0);
        return tree;
    }

    // single-linkage hierarchy: node ids >= n are merges
    std::vector<std::size_t> order(mst.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return mst[a].weight < mst[b].weight; });

    const std::size_t total = 2 * n - 1;
    std::vector<std::size_t> uf_parent(total);
    std::iota(uf_parent.begin(), uf_parent.end(), std::size_t{0});
    auto find = [&](std::size_t x) {
        std::size_t r = x;
        while (uf_parent[r] != r) r = uf_parent[r];
        while (uf_parent[x] != r) {
            const std::size_t next = uf_parent[x];
            uf_parent[x] = r;
            x = next;
        }
        return r;
    };
    std::vector<std::size_t> left(n - 1), right(n - 1), size(total, 1);
    std::vector<double> dist(n - 1);
    for (std::size_t i = 0; i < order.size(); ++i) {
        const auto& e = mst[order[i]];
        const std::size_t ra = find(e.a), rb = find(e.b);
        const std::size_t node = n + i;
        left[i] = ra;
        right[i] = rb;
        dist[i] = e.weight;
        size[node] = size[ra] + size[rb];
        uf_parent[ra] = uf_parent[rb] = node;
    }

    const double cap = std::numeric_limits<double>::max() / (4.0 * static_cast<double>(n));
    auto leaves_under = [&](std::size_t node, std::vector<std::size_t>& out) {
        std::vector<std::size_t> stack{node};
        while (!stack.empty()) {
            const std::size_t x = stack.back();
            stack.pop_back();
            if (x < n) {
                out.push_back(x);
            } else {
                stack.push_back(right[x - n]);
                stack.push_back(left[x - n]);
            }
        }
    };

    const std::size_t m = min_cluster_size;
    std::vector<std::size_t> fallen;
    // (hierarchy node, condensed cluster id)
    std::vector<std::pair<std::size_t, int>> work{{total - 1, 0}};
    while (!work.empty()) {
        auto [node, cid] = work.back();
        work.pop_back();
        while (true) {
            if (node < n) {
                // a single point reached as the "large" side only happens when m is 1; treat as fall-out
                auto& c = tree.clusters[static_cast<std::size_t>(cid)];
                c.points.push_back(node);
                c.point_lambdas.push_back(c.death_lambda);
                break;
            }
            const std::size_t l = left[node - n], r = right[node - n];
            const double lam = lambda_of(dist[node - n], cap);
            const std::size_t sl = size[l], sr = size[r];
            if (sl >= m && sr >= m) {
                tree.clusters[static_cast<std::size_t>(cid)].death_lambda = lam;
                for (std::size_t child : {l, r}) {
                    CondensedCluster cc;
                    cc.parent = cid;
                    cc.birth_lambda = lam;
                    cc.death_lambda = lam;
                    tree.clusters.push_back(std::move(cc));
                    const int child_id = static_cast<int>(tree.clusters.size() - 1);
                    tree.clusters[static_cast<std::size_t>(cid)].children.push_back(child_id);
                    work.emplace_back(child, child_id);
                }
                // process left before right (stack order)
                std::swap(work[work.size() - 1], work[work.size() - 2]);
                break;
            }
            auto& c = tree.clusters[static_cast<std::size_t>(cid)];
            if (sl < m && sr < m) {
                fallen.clear();
                leaves_under(l, fallen);
                leaves_under(r, fallen);
                for (auto p : fallen) {
                    c.points.push_back(p);
                    c.point_lambdas.push_back(lam);
                }
                c.death_lambda = lam;
                break;
            }
            const std::size_t small = sl < m ? l : r;
            const std::size_t big = sl < m ? r : l;
            fallen.clear();
            leaves_under(small, fallen);
            for (auto p : fallen) {
                c.points.push_back(p);
                c.point_lambdas.push_back(lam);
            }
            c.death_lambda = lam;
            node = big;
        }
    }

    for (auto& c : tree.clusters) {
        double s = 0.0;
        for (double lam : c.point_lambdas) s += lam - c.birth_lambda;
        c.stability = s;
    }
    for (std::size_t id = 1; id < tree.clusters.size(); ++id) {
        auto& c = tree.clusters[id];
        auto& parent = tree.clusters[static_cast<std::size_t>(c.parent)];
        // mass that left the parent through this child, at the child's birth
        std::size_t child_size = 0;
        std::vector<int> stack{static_cast<int>(id)};
        while (!stack.empty()) {
            const auto& x = tree.clusters[static_cast<std::size_t>(stack.back())];
            stack.pop_back();
            child_size += x.points.size();
            for (int ch : x.children) stack.push_back(ch);
        }
        parent.stability += (c.birth_lambda - parent.birth_lambda) * static_cast<double>(child_size);
    }
    return tree;
}

std::vector<int> select_eom(CondensedTree& tree) {
    const std::size_t count = tree.clusters.size();
    std::vector<double> subtree(count, 0.0);
    for (auto& c : tree.clusters) c.selected = false;
    for (std::size_t id = count; id-- > 1;) {
        auto& c = tree.clusters[id];
        double child_sum = 0.0;
        for (int ch : c.children) child_sum += subtree[static_cast<std::size_t>(ch)];
        if (c.children.empty() || c.stability >= child_sum) {
            c.selected = true;
            subtree[id] = c.stability;
            std::vector<int> stack(c.children.begin(), c.children.end());
            while (!stack.empty()) {
                auto& d = tree.clusters[static_cast<std::size_t>(stack.back())];
                stack.pop_back();
                d.selected = false;
                stack.insert(stack.end(), d.children.begin(), d.children.end());
            }
        } else {
            subtree[id] = child_sum;
        }
    }
    std::vector<int> selected;
    for (std::size_t id = 1; id < count; ++id)
        if (tree.clusters[id].selected) selected.push_back(static_cast<int>(id));
    return selected;
}

Result cluster_with_tree(const FeatureMatrix& features, std::size_t min_pts) {
    const auto core = core_distances(features, min_pts);
    const auto mst = mutual_reachability_mst(features, core);
    Result out;
    out.tree = condense(mst, features.rows(), min_pts);
    const auto selected = select_eom(out.tree);
    out.labels.labels.assign(features.rows(), kOutlier);
    for (std::size_t k = 0; k < selected.size(); ++k)
        for (auto p : out.tree.members(selected[k])) out.labels.labels[p] = static_cast<int>(k);
    out.labels = canonicalize(out.labels);
    return out;
}

Labeling cluster(const FeatureMatrix& features, std::size_t min_pts) {
    return cluster_with_tree(features, min_pts).labels;
}

}  // namespace deint::hdbscan
