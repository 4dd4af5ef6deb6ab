#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "tvlnet/graphview.hpp"
#include "tvlnet/ricci.hpp"
#include "tvlnet/snapshot.hpp"

namespace tvlnet {

/// Global structure metrics for one snapshot. Degenerate fields (too few
/// nodes, zero-variance degrees, disconnected trivia) are absent rather
/// than forced to a sentinel. Entropies are in nats.
struct MetricsReport {
    std::string date;
    std::size_t n_nodes = 0;
    std::size_t n_edges = 0;
    std::optional<double> degree_centralization;
    std::optional<double> degree_cv;
    std::optional<double> degree_entropy;
    std::optional<double> top_decile_concentration;
    std::optional<double> assortativity;
    std::optional<double> avg_closeness;
    std::optional<double> density;
    std::optional<double> clustering_coefficient;
    std::optional<double> network_entropy;
    std::optional<double> ollivier_ricci_mean;
    std::size_t ricci_skipped_edges = 0;
};

namespace detail {

inline std::optional<double> pearson(const std::vector<double>& xs,
                                     const std::vector<double>& ys) {
    const std::size_t n = xs.size();
    if (n == 0 || ys.size() != n) return std::nullopt;
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(n);
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(n);
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (sxx <= 0.0 || syy <= 0.0) return std::nullopt;
    return sxy / std::sqrt(sxx * syy);
}

/// BFS over directed out-edges; returns hop distances, -1 when unreachable.
inline std::vector<int> bfs_directed(const GraphView& g, int src) {
    std::vector<int> dist(static_cast<std::size_t>(g.n()), -1);
    std::deque<int> q;
    dist[static_cast<std::size_t>(src)] = 0;
    q.push_back(src);
    while (!q.empty()) {
        const int u = q.front();
        q.pop_front();
        for (int v : g.out_adj[static_cast<std::size_t>(u)]) {
            if (dist[static_cast<std::size_t>(v)] < 0) {
                dist[static_cast<std::size_t>(v)] = dist[static_cast<std::size_t>(u)] + 1;
                q.push_back(v);
            }
        }
    }
    return dist;
}

}  // namespace detail

/// Total degree (in + out) is used throughout, following the definition the
/// metric formulas are stated with. Centralization is normalized by the
/// maximum attainable total-degree sum 2(n-1)(n-2), which a bidirectional
/// star saturates at exactly 1.
inline MetricsReport compute_metrics(const NetworkSnapshot& snapshot,
                                     bool include_curvature = true, double ricci_alpha = 0.0,
                                     unsigned workers = 1) {
    const GraphView g = build_graph_view(snapshot);
    MetricsReport r;
    r.date = snapshot.date;
    const int n = g.n();
    r.n_nodes = static_cast<std::size_t>(n);
    r.n_edges = g.edges.size();
    if (n == 0) return r;

    std::vector<int> deg(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v) deg[static_cast<std::size_t>(v)] = g.total_degree(v);
    const double deg_sum = std::accumulate(deg.begin(), deg.end(), 0.0);

    if (n >= 3) {
        const int dmax = *std::max_element(deg.begin(), deg.end());
        double acc = 0;
        for (int d : deg) acc += dmax - d;
        r.degree_centralization =
            acc / (2.0 * (n - 1) * (n - 2));
    }

    {
        const double mu = deg_sum / n;
        double var = 0;
        for (int d : deg) var += (d - mu) * (d - mu);
        var /= n;
        const double sigma = std::sqrt(var);
        r.degree_cv = sigma == 0.0 ? 0.0 : sigma / mu;
    }

    {
        std::map<int, int> hist;
        for (int d : deg) ++hist[d];
        double h = 0;
        for (const auto& [_, c] : hist) {
            const double p = static_cast<double>(c) / n;
            h -= p * std::log(p);
        }
        r.degree_entropy = h;
    }

    if (deg_sum > 0) {
        std::vector<int> order(static_cast<std::size_t>(n));
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            if (deg[static_cast<std::size_t>(a)] != deg[static_cast<std::size_t>(b)])
                return deg[static_cast<std::size_t>(a)] > deg[static_cast<std::size_t>(b)];
            return g.ids[static_cast<std::size_t>(a)] < g.ids[static_cast<std::size_t>(b)];
        });
        const std::size_t top = static_cast<std::size_t>(
            std::ceil(0.1 * static_cast<double>(n)));
        double top_sum = 0;
        for (std::size_t i = 0; i < top && i < order.size(); ++i)
            top_sum += deg[static_cast<std::size_t>(order[i])];
        r.top_decile_concentration = top_sum / deg_sum;
    }

    if (n >= 3 && !g.edges.empty()) {
        std::vector<double> xs, ys;
        xs.reserve(g.edges.size());
        ys.reserve(g.edges.size());
        for (const auto& e : g.edges) {
            xs.push_back(deg[static_cast<std::size_t>(e.src)]);
            ys.push_back(deg[static_cast<std::size_t>(e.dst)]);
        }
        r.assortativity = detail::pearson(xs, ys);
    }

    if (n >= 2) {
        // Wasserman-Faust closeness: restrict to reachable targets and scale
        // by reachable-share so disconnected graphs stay well defined; on a
        // strongly connected graph this is exactly (n-1)/sum d(i,j).
        double total = 0;
        for (int i = 0; i < n; ++i) {
            const auto dist = detail::bfs_directed(g, i);
            double sum = 0;
            int reach = 0;
            for (int j = 0; j < n; ++j) {
                if (j == i || dist[static_cast<std::size_t>(j)] < 0) continue;
                sum += dist[static_cast<std::size_t>(j)];
                ++reach;
            }
            if (reach > 0 && sum > 0)
                total += (static_cast<double>(reach) / (n - 1)) *
                         (static_cast<double>(reach) / sum);
        }
        r.avg_closeness = total / n;
        r.density = static_cast<double>(g.edges.size()) /
                    (static_cast<double>(n) * (n - 1));
    }

    {
        double acc = 0;
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
            acc += 2.0 * tri / (static_cast<double>(k) * (static_cast<double>(k) - 1));
        }
        r.clustering_coefficient = acc / n;
    }

    if (!g.edges.empty()) {
        double wsum = 0;
        for (const auto& e : g.edges) wsum += e.weight;
        if (wsum > 0) {
            double h = 0;
            for (const auto& e : g.edges) {
                const double p = e.weight / wsum;
                if (p > 0) h -= p * std::log(p);
            }
            r.network_entropy = h;
        }
    }

    if (include_curvature && !g.und_edges.empty()) {
        const RicciReport ricci = ollivier_ricci(g, ricci_alpha, workers);
        if (ricci.evaluated_edges > 0) r.ollivier_ricci_mean = ricci.mean;
        r.ricci_skipped_edges = ricci.skipped_edges;
    }
    return r;
}

/// Top-k links by composition cardinality, ties by (source, target).
struct CompositionEntry {
    std::string source;
    std::string target;
    std::size_t length = 0;
};

inline std::vector<CompositionEntry> composition_length(const NetworkSnapshot& s,
                                                        std::size_t k) {
    if (k < 1) throw std::invalid_argument("composition_length: k must be >= 1");
    std::vector<CompositionEntry> all;
    all.reserve(s.links.size());
    for (const auto& l : s.links)
        all.push_back({l.source, l.target, l.composition.size()});
    std::sort(all.begin(), all.end(), [](const CompositionEntry& a, const CompositionEntry& b) {
        if (a.length != b.length) return a.length > b.length;
        return std::tie(a.source, a.target) < std::tie(b.source, b.target);
    });
    if (all.size() > k) all.resize(k);
    return all;
}

// ------------------------------------------------------------------- csv

inline std::string metrics_csv_header() {
    return "date,n_nodes,n_edges,degree_centralization,degree_cv,degree_entropy,"
           "top_decile_concentration,assortativity,avg_closeness,density,"
           "clustering_coefficient,network_entropy,ollivier_ricci_mean,ricci_skipped_edges\n";
}

inline std::string metrics_csv_row(const MetricsReport& r) {
    auto opt = [](const std::optional<double>& v) {
        if (!v) return std::string();
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.12g", *v);
        return std::string(buf);
    };
    std::string out = r.date;
    out += "," + std::to_string(r.n_nodes) + "," + std::to_string(r.n_edges);
    for (const auto* f :
         {&r.degree_centralization, &r.degree_cv, &r.degree_entropy,
          &r.top_decile_concentration, &r.assortativity, &r.avg_closeness, &r.density,
          &r.clustering_coefficient, &r.network_entropy, &r.ollivier_ricci_mean})
        out += "," + opt(*f);
    out += "," + std::to_string(r.ricci_skipped_edges) + "\n";
    return out;
}

}  // namespace tvlnet
