#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <deque>
#include <stack>
#include <string>
#include <vector>

#include "tvlnet/graphview.hpp"

namespace tvlnet {

/// Per-node structural features used for embedding: degree centrality,
/// betweenness, eigenvector centrality, PageRank, local clustering, TVL.
/// `standardized` is the z-scored copy (TVL is log1p-transformed first so
/// it does not dominate distances).
struct NodeFeatures {
    std::vector<std::string> ids;
    std::vector<std::string> columns;
    Eigen::MatrixXd raw;           // n x 6
    Eigen::MatrixXd standardized;  // n x 6
};

namespace detail {

/// Brandes betweenness on the directed unweighted graph, normalized by
/// (n-1)(n-2).
inline std::vector<double> betweenness(const GraphView& g) {
    const int n = g.n();
    std::vector<double> bc(static_cast<std::size_t>(n), 0.0);
    if (n < 3) return bc;
    for (int s = 0; s < n; ++s) {
        std::vector<std::vector<int>> preds(static_cast<std::size_t>(n));
        std::vector<double> sigma(static_cast<std::size_t>(n), 0.0);
        std::vector<int> dist(static_cast<std::size_t>(n), -1);
        std::vector<int> order;
        order.reserve(static_cast<std::size_t>(n));
        sigma[static_cast<std::size_t>(s)] = 1.0;
        dist[static_cast<std::size_t>(s)] = 0;
        std::deque<int> q{s};
        while (!q.empty()) {
            const int u = q.front();
            q.pop_front();
            order.push_back(u);
            for (int v : g.out_adj[static_cast<std::size_t>(u)]) {
                if (dist[static_cast<std::size_t>(v)] < 0) {
                    dist[static_cast<std::size_t>(v)] = dist[static_cast<std::size_t>(u)] + 1;
                    q.push_back(v);
                }
                if (dist[static_cast<std::size_t>(v)] ==
                    dist[static_cast<std::size_t>(u)] + 1) {
                    sigma[static_cast<std::size_t>(v)] += sigma[static_cast<std::size_t>(u)];
                    preds[static_cast<std::size_t>(v)].push_back(u);
                }
            }
        }
        std::vector<double> delta(static_cast<std::size_t>(n), 0.0);
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            const int w = *it;
            for (int u : preds[static_cast<std::size_t>(w)])
                delta[static_cast<std::size_t>(u)] +=
                    sigma[static_cast<std::size_t>(u)] / sigma[static_cast<std::size_t>(w)] *
                    (1.0 + delta[static_cast<std::size_t>(w)]);
            if (w != s) bc[static_cast<std::size_t>(w)] += delta[static_cast<std::size_t>(w)];
        }
    }
    const double norm = static_cast<double>(n - 1) * (n - 2);
    for (auto& v : bc) v /= norm;
    return bc;
}

/// Power iteration on the largest connected component of the undirected
/// projection; nodes outside that component get 0.
inline std::vector<double> eigenvector_centrality(const GraphView& g) {
    const int n = g.n();
    std::vector<double> out(static_cast<std::size_t>(n), 0.0);
    if (g.und_edges.empty()) return out;

    std::vector<int> comp(static_cast<std::size_t>(n), -1);
    int n_comp = 0;
    for (int s = 0; s < n; ++s) {
        if (comp[static_cast<std::size_t>(s)] >= 0) continue;
        std::deque<int> q{s};
        comp[static_cast<std::size_t>(s)] = n_comp;
        while (!q.empty()) {
            const int u = q.front();
            q.pop_front();
            for (int v : g.und_adj[static_cast<std::size_t>(u)]) {
                if (comp[static_cast<std::size_t>(v)] < 0) {
                    comp[static_cast<std::size_t>(v)] = n_comp;
                    q.push_back(v);
                }
            }
        }
        ++n_comp;
    }
    std::vector<int> size(static_cast<std::size_t>(n_comp), 0);
    for (int v = 0; v < n; ++v) ++size[static_cast<std::size_t>(comp[static_cast<std::size_t>(v)])];
    int big = 0;
    for (int c = 1; c < n_comp; ++c)
        if (size[static_cast<std::size_t>(c)] > size[static_cast<std::size_t>(big)]) big = c;

    std::vector<int> members;
    for (int v = 0; v < n; ++v)
        if (comp[static_cast<std::size_t>(v)] == big) members.push_back(v);
    if (members.size() < 2) return out;

    std::vector<double> x(members.size(), 1.0 / std::sqrt(static_cast<double>(members.size())));
    std::vector<int> pos(static_cast<std::size_t>(n), -1);
    for (std::size_t i = 0; i < members.size(); ++i)
        pos[static_cast<std::size_t>(members[i])] = static_cast<int>(i);
    for (int iter = 0; iter < 1000; ++iter) {
        std::vector<double> y(members.size(), 0.0);
        for (std::size_t i = 0; i < members.size(); ++i)
            for (int v : g.und_adj[static_cast<std::size_t>(members[i])])
                y[i] += x[static_cast<std::size_t>(pos[static_cast<std::size_t>(v)])];
        double norm = 0;
        for (double v : y) norm += v * v;
        norm = std::sqrt(norm);
        if (norm == 0) break;
        double diff = 0;
        for (std::size_t i = 0; i < y.size(); ++i) {
            y[i] /= norm;
            diff = std::max(diff, std::abs(y[i] - x[i]));
        }
        x.swap(y);
        if (diff < 1e-12) break;
    }
    for (std::size_t i = 0; i < members.size(); ++i)
        out[static_cast<std::size_t>(members[i])] = x[i];
    return out;
}

/// PageRank with damping 0.85, uniform dangling redistribution, iterated to
/// an L1 tolerance of 1e-8 and renormalized so the values sum to 1.
inline std::vector<double> pagerank(const GraphView& g, double damping = 0.85,
                                    double tol = 1e-8) {
    const int n = g.n();
    std::vector<double> pr(static_cast<std::size_t>(n), 1.0 / n);
    std::vector<int> outdeg(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v)
        outdeg[static_cast<std::size_t>(v)] =
            static_cast<int>(g.out_adj[static_cast<std::size_t>(v)].size());
    for (int iter = 0; iter < 1000; ++iter) {
        std::vector<double> next(static_cast<std::size_t>(n), (1.0 - damping) / n);
        double dangling = 0;
        for (int v = 0; v < n; ++v)
            if (outdeg[static_cast<std::size_t>(v)] == 0) dangling += pr[static_cast<std::size_t>(v)];
        for (int v = 0; v < n; ++v) {
            const double share = damping * pr[static_cast<std::size_t>(v)] /
                                 std::max(1, outdeg[static_cast<std::size_t>(v)]);
            for (int u : g.out_adj[static_cast<std::size_t>(v)])
                next[static_cast<std::size_t>(u)] += share;
        }
        const double spread = damping * dangling / n;
        for (auto& v : next) v += spread;
        double l1 = 0;
        for (int v = 0; v < n; ++v) l1 += std::abs(next[static_cast<std::size_t>(v)] - pr[static_cast<std::size_t>(v)]);
        pr.swap(next);
        if (l1 < tol) break;
    }
    double sum = 0;
    for (double v : pr) sum += v;
    for (auto& v : pr) v /= sum;
    return pr;
}

inline std::vector<double> local_clustering(const GraphView& g) {
    const int n = g.n();
    std::vector<double> cc(static_cast<std::size_t>(n), 0.0);
    for (int v = 0; v < n; ++v) {
        const auto& nb = g.und_adj[static_cast<std::size_t>(v)];
        const std::size_t k = nb.size();
        if (k < 2) continue;
        int tri = 0;
        for (std::size_t a = 0; a < k; ++a)
            for (std::size_t b = a + 1; b < k; ++b) {
                const auto& na = g.und_adj[static_cast<std::size_t>(nb[a])];
                if (std::binary_search(na.begin(), na.end(), nb[b])) ++tri;
            }
        cc[static_cast<std::size_t>(v)] =
            2.0 * tri / (static_cast<double>(k) * (static_cast<double>(k) - 1));
    }
    return cc;
}

}  // namespace detail

inline NodeFeatures node_features(const NetworkSnapshot& snapshot) {
    const GraphView g = build_graph_view(snapshot);
    const int n = g.n();
    if (n == 0) throw std::invalid_argument("node_features: empty graph");

    NodeFeatures f;
    f.ids = g.ids;
    f.columns = {"degree_centrality", "betweenness",      "eigenvector",
                 "pagerank",          "local_clustering", "tvl"};
    f.raw.resize(n, 6);

    const auto bc = detail::betweenness(g);
    const auto ev = detail::eigenvector_centrality(g);
    const auto pr = detail::pagerank(g);
    const auto cc = detail::local_clustering(g);
    for (int v = 0; v < n; ++v) {
        f.raw(v, 0) = n > 1 ? static_cast<double>(g.total_degree(v)) / (n - 1) : 0.0;
        f.raw(v, 1) = bc[static_cast<std::size_t>(v)];
        f.raw(v, 2) = ev[static_cast<std::size_t>(v)];
        f.raw(v, 3) = pr[static_cast<std::size_t>(v)];
        f.raw(v, 4) = cc[static_cast<std::size_t>(v)];
        f.raw(v, 5) = g.node_size[static_cast<std::size_t>(v)];
    }

    f.standardized = f.raw;
    for (int v = 0; v < n; ++v) f.standardized(v, 5) = std::log1p(std::max(0.0, f.raw(v, 5)));
    for (int c = 0; c < 6; ++c) {
        const double mean = f.standardized.col(c).mean();
        const double var =
            (f.standardized.col(c).array() - mean).square().sum() / static_cast<double>(n);
        const double sd = std::sqrt(var);
        if (sd > 0)
            f.standardized.col(c) = (f.standardized.col(c).array() - mean) / sd;
        else
            f.standardized.col(c).setZero();
    }
    return f;
}

}  // namespace tvlnet
