// Test-only reference implementations, written independently of the library
// code paths they check: direct formula evaluation, exhaustive enumeration,
// integer-exact min-cost flow, and Floyd-Warshall. Deliberately simple and
// slow.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tvlnet/snapshot.hpp"

namespace oracle {

// ------------------------------------------------------- graph scaffolding

struct TinyGraph {
    int n = 0;
    std::vector<std::pair<int, int>> directed_edges;
    std::vector<double> weights;  // parallel to directed_edges

    std::vector<std::vector<bool>> adj() const {
        std::vector<std::vector<bool>> a(static_cast<std::size_t>(n),
                                         std::vector<bool>(static_cast<std::size_t>(n), false));
        for (auto [u, v] : directed_edges) a[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)] = true;
        return a;
    }

    std::vector<int> total_degree() const {
        std::vector<int> d(static_cast<std::size_t>(n), 0);
        for (auto [u, v] : directed_edges) {
            ++d[static_cast<std::size_t>(u)];
            ++d[static_cast<std::size_t>(v)];
        }
        return d;
    }

    std::set<std::pair<int, int>> undirected_edges() const {
        std::set<std::pair<int, int>> s;
        for (auto [u, v] : directed_edges)
            if (u != v) s.insert({std::min(u, v), std::max(u, v)});
        return s;
    }
};

inline tvlnet::NetworkSnapshot to_snapshot(const TinyGraph& g, const std::string& date = "2020-03-23") {
    tvlnet::NetworkSnapshot s;
    s.date = date;
    auto name = [](int i) {
        std::string out;
        out.push_back(static_cast<char>('a' + i % 26));
        if (i >= 26) out += std::to_string(i / 26);
        return out;
    };
    for (int i = 0; i < g.n; ++i) {
        tvlnet::SnapshotNode node;
        node.id = name(i);
        node.size = tvlnet::Decimal::from_int(10 * (i + 1));
        s.nodes.push_back(node);
    }
    std::sort(s.nodes.begin(), s.nodes.end(),
              [](const auto& a, const auto& b) { return a.id < b.id; });
    std::map<std::pair<std::string, std::string>, double> acc;
    for (std::size_t i = 0; i < g.directed_edges.size(); ++i) {
        auto [u, v] = g.directed_edges[i];
        if (u == v) continue;
        acc[{name(u), name(v)}] += g.weights.empty() ? 1.0 : g.weights[i];
    }
    for (const auto& [key, w] : acc) {
        tvlnet::SnapshotLink l;
        l.source = key.first;
        l.target = key.second;
        l.size = tvlnet::Decimal::from_double(w);
        l.composition["tok"] = l.size;
        s.links.push_back(l);
    }
    return s;
}

// ----------------------------------------------------------- metric oracles

inline std::optional<double> centralization(const TinyGraph& g) {
    if (g.n < 3) return std::nullopt;
    auto d = g.total_degree();
    const int dmax = *std::max_element(d.begin(), d.end());
    double sum = 0;
    for (int x : d) sum += dmax - x;
    return sum / (2.0 * (g.n - 1) * (g.n - 2));
}

inline std::optional<double> degree_cv(const TinyGraph& g) {
    auto d = g.total_degree();
    double mu = std::accumulate(d.begin(), d.end(), 0.0) / g.n;
    double var = 0;
    for (int x : d) var += (x - mu) * (x - mu);
    double sigma = std::sqrt(var / g.n);
    if (sigma == 0) return 0.0;
    return sigma / mu;
}

inline double degree_entropy(const TinyGraph& g) {
    auto d = g.total_degree();
    std::map<int, int> counts;
    for (int x : d) ++counts[x];
    double h = 0;
    for (auto& [_, c] : counts) {
        double p = static_cast<double>(c) / g.n;
        h -= p * std::log(p);
    }
    return h;
}

inline std::optional<double> top_decile(const TinyGraph& g) {
    auto d = g.total_degree();
    double total = std::accumulate(d.begin(), d.end(), 0.0);
    if (total == 0) return std::nullopt;
    std::sort(d.rbegin(), d.rend());
    std::size_t k = static_cast<std::size_t>(std::ceil(0.1 * g.n));
    double top = 0;
    for (std::size_t i = 0; i < k; ++i) top += d[i];
    return top / total;
}

inline std::optional<double> assortativity(const TinyGraph& g) {
    if (g.n < 3 || g.directed_edges.empty()) return std::nullopt;
    auto d = g.total_degree();
    std::vector<double> xs, ys;
    for (auto [u, v] : g.directed_edges) {
        xs.push_back(d[static_cast<std::size_t>(u)]);
        ys.push_back(d[static_cast<std::size_t>(v)]);
    }
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxy += xs[i] * ys[i];
        sxx += xs[i] * xs[i];
        syy += ys[i] * ys[i];
    }
    const double cov = sxy / n - (sx / n) * (sy / n);
    const double vx = sxx / n - (sx / n) * (sx / n);
    const double vy = syy / n - (sy / n) * (sy / n);
    if (vx <= 0 || vy <= 0) return std::nullopt;
    return cov / std::sqrt(vx * vy);
}

/// Floyd-Warshall hop distances over directed edges.
inline std::vector<std::vector<double>> fw_distances(const TinyGraph& g) {
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<std::vector<double>> d(static_cast<std::size_t>(g.n),
                                       std::vector<double>(static_cast<std::size_t>(g.n), inf));
    for (int i = 0; i < g.n; ++i) d[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 0;
    for (auto [u, v] : g.directed_edges)
        d[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)] = 1;
    for (int k = 0; k < g.n; ++k)
        for (int i = 0; i < g.n; ++i)
            for (int j = 0; j < g.n; ++j)
                d[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                    std::min(d[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)],
                             d[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] +
                                 d[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)]);
    return d;
}

/// Wasserman-Faust closeness averaged over nodes.
inline std::optional<double> avg_closeness(const TinyGraph& g) {
    if (g.n < 2) return std::nullopt;
    auto d = fw_distances(g);
    double total = 0;
    for (int i = 0; i < g.n; ++i) {
        double sum = 0;
        int reach = 0;
        for (int j = 0; j < g.n; ++j) {
            if (i == j || std::isinf(d[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]))
                continue;
            sum += d[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            ++reach;
        }
        if (reach > 0 && sum > 0)
            total += (static_cast<double>(reach) / (g.n - 1)) * (static_cast<double>(reach) / sum);
    }
    return total / g.n;
}

inline std::optional<double> density(const TinyGraph& g) {
    if (g.n < 2) return std::nullopt;
    std::set<std::pair<int, int>> uniq;
    for (auto [u, v] : g.directed_edges)
        if (u != v) uniq.insert({u, v});
    return static_cast<double>(uniq.size()) / (static_cast<double>(g.n) * (g.n - 1));
}

inline double clustering(const TinyGraph& g) {
    auto und = g.undirected_edges();
    auto connected = [&](int a, int b) {
        return und.count({std::min(a, b), std::max(a, b)}) > 0;
    };
    double acc = 0;
    for (int v = 0; v < g.n; ++v) {
        std::vector<int> nb;
        for (int u = 0; u < g.n; ++u)
            if (u != v && connected(u, v)) nb.push_back(u);
        if (nb.size() < 2) continue;
        int tri = 0;
        for (std::size_t a = 0; a < nb.size(); ++a)
            for (std::size_t b = a + 1; b < nb.size(); ++b)
                if (connected(nb[a], nb[b])) ++tri;
        acc += 2.0 * tri / (static_cast<double>(nb.size()) * (nb.size() - 1));
    }
    return acc / g.n;
}

inline std::optional<double> network_entropy(const TinyGraph& g) {
    std::map<std::pair<int, int>, double> uniq;
    for (std::size_t i = 0; i < g.directed_edges.size(); ++i) {
        auto [u, v] = g.directed_edges[i];
        if (u != v) uniq[{u, v}] += g.weights.empty() ? 1.0 : g.weights[i];
    }
    if (uniq.empty()) return std::nullopt;
    double total = 0;
    for (auto& [_, w] : uniq) total += w;
    double h = 0;
    for (auto& [_, w] : uniq) {
        double p = w / total;
        if (p > 0) h -= p * std::log(p);
    }
    return h;
}

// ------------------------------------------------------- transport oracles

/// Exact integer min-cost flow by Bellman-Ford augmentation; supplies,
/// demands, and costs are integers so every intermediate value is exact.
inline long long transport_int(const std::vector<long long>& supply,
                               const std::vector<long long>& demand,
                               const std::vector<std::vector<long long>>& cost) {
    const int m = static_cast<int>(supply.size());
    const int n = static_cast<int>(demand.size());
    std::vector<long long> s = supply, d = demand;
    std::vector<std::vector<long long>> flow(static_cast<std::size_t>(m),
                                             std::vector<long long>(static_cast<std::size_t>(n), 0));
    long long total = 0;
    for (long long x : s) total += x;
    long long cost_total = 0;
    // successive cheapest augmenting assignment on the residual bipartite
    // graph (Bellman-Ford over supplier/demander potentials)
    while (total > 0) {
        // residual graph nodes: m suppliers + n demanders; arcs i->j with
        // cost c[i][j] (infinite cap) and j->i with -c[i][j] (cap flow[i][j])
        const long long INF = std::numeric_limits<long long>::max() / 4;
        std::vector<long long> dist(static_cast<std::size_t>(m + n), INF);
        std::vector<int> from(static_cast<std::size_t>(m + n), -1);
        for (int i = 0; i < m; ++i)
            if (s[static_cast<std::size_t>(i)] > 0) dist[static_cast<std::size_t>(i)] = 0;
        for (int it = 0; it < m + n; ++it) {
            bool changed = false;
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < n; ++j) {
                    if (dist[static_cast<std::size_t>(i)] < INF &&
                        dist[static_cast<std::size_t>(i)] + cost[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] <
                            dist[static_cast<std::size_t>(m + j)]) {
                        dist[static_cast<std::size_t>(m + j)] =
                            dist[static_cast<std::size_t>(i)] + cost[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
                        from[static_cast<std::size_t>(m + j)] = i;
                        changed = true;
                    }
                    if (flow[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] > 0 &&
                        dist[static_cast<std::size_t>(m + j)] < INF &&
                        dist[static_cast<std::size_t>(m + j)] - cost[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] <
                            dist[static_cast<std::size_t>(i)]) {
                        dist[static_cast<std::size_t>(i)] =
                            dist[static_cast<std::size_t>(m + j)] - cost[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
                        from[static_cast<std::size_t>(i)] = m + j;
                        changed = true;
                    }
                }
            if (!changed) break;
        }
        // cheapest reachable demander with remaining demand
        int best_j = -1;
        for (int j = 0; j < n; ++j)
            if (d[static_cast<std::size_t>(j)] > 0 && dist[static_cast<std::size_t>(m + j)] < INF &&
                (best_j < 0 || dist[static_cast<std::size_t>(m + j)] < dist[static_cast<std::size_t>(m + best_j)]))
                best_j = j;
        if (best_j < 0) break;  // infeasible; callers use balanced inputs
        // trace path back to a supplier, find bottleneck
        std::vector<int> path;  // alternating nodes ending at supplier
        int cur = m + best_j;
        long long bottleneck = d[static_cast<std::size_t>(best_j)];
        while (from[static_cast<std::size_t>(cur)] >= 0) {
            path.push_back(cur);
            cur = from[static_cast<std::size_t>(cur)];
        }
        path.push_back(cur);  // supplier with dist 0
        bottleneck = std::min(bottleneck, s[static_cast<std::size_t>(cur)]);
        // reverse arcs along the path cap the bottleneck at their flow
        for (std::size_t k = 0; k + 1 < path.size(); ++k) {
            int to = path[k], fr = path[k + 1];
            if (fr >= m && to < m)  // reverse arc j->i limited by flow[i][j]
                bottleneck = std::min(bottleneck,
                                      flow[static_cast<std::size_t>(to)][static_cast<std::size_t>(fr - m)]);
        }
        // apply along path
        for (std::size_t k = 0; k + 1 < path.size(); ++k) {
            int to = path[k], fr = path[k + 1];
            if (fr < m && to >= m) {
                flow[static_cast<std::size_t>(fr)][static_cast<std::size_t>(to - m)] += bottleneck;
                cost_total += bottleneck * cost[static_cast<std::size_t>(fr)][static_cast<std::size_t>(to - m)];
            } else if (fr >= m && to < m) {
                flow[static_cast<std::size_t>(to)][static_cast<std::size_t>(fr - m)] -= bottleneck;
                cost_total -= bottleneck * cost[static_cast<std::size_t>(to)][static_cast<std::size_t>(fr - m)];
            }
        }
        s[static_cast<std::size_t>(path.back())] -= bottleneck;
        d[static_cast<std::size_t>(best_j)] -= bottleneck;
        total -= bottleneck;
    }
    return cost_total;
}

/// Exhaustive vertex enumeration of the transportation polytope: every
/// basic feasible solution corresponds to a spanning tree of the complete
/// bipartite support graph. Only usable for tiny supports.
inline double transport_enumerate(const std::vector<double>& supply,
                                  const std::vector<double>& demand,
                                  const std::vector<std::vector<double>>& cost) {
    const int m = static_cast<int>(supply.size());
    const int n = static_cast<int>(demand.size());
    const int cells = m * n;
    const int need = m + n - 1;
    double best = std::numeric_limits<double>::infinity();

    std::vector<int> chosen;
    // solve the tree allocation by leaf elimination
    auto evaluate = [&]() {
        std::vector<double> s = supply, d = demand;
        std::vector<std::pair<int, int>> tree;
        tree.reserve(chosen.size());
        for (int c : chosen) tree.push_back({c / n, c % n});
        std::vector<double> alloc(chosen.size(), 0.0);
        std::vector<bool> done(chosen.size(), false);
        for (int round = 0; round < need; ++round) {
            // find a leaf: a row or column incident to exactly one pending cell
            int leaf = -1;
            bool row_leaf = false;
            for (int i = 0; i < m && leaf < 0; ++i) {
                int count = 0, idx = -1;
                for (std::size_t k = 0; k < tree.size(); ++k)
                    if (!done[k] && tree[k].first == i) {
                        ++count;
                        idx = static_cast<int>(k);
                    }
                if (count == 1) {
                    leaf = idx;
                    row_leaf = true;
                }
            }
            for (int j = 0; j < n && leaf < 0; ++j) {
                int count = 0, idx = -1;
                for (std::size_t k = 0; k < tree.size(); ++k)
                    if (!done[k] && tree[k].second == j) {
                        ++count;
                        idx = static_cast<int>(k);
                    }
                if (count == 1) {
                    leaf = idx;
                    row_leaf = false;
                }
            }
            if (leaf < 0) return;  // not a spanning tree
            auto [i, j] = tree[static_cast<std::size_t>(leaf)];
            const double amount = row_leaf ? s[static_cast<std::size_t>(i)] : d[static_cast<std::size_t>(j)];
            alloc[static_cast<std::size_t>(leaf)] = amount;
            s[static_cast<std::size_t>(i)] -= amount;
            d[static_cast<std::size_t>(j)] -= amount;
            done[static_cast<std::size_t>(leaf)] = true;
        }
        double total = 0;
        for (std::size_t k = 0; k < tree.size(); ++k) {
            if (alloc[k] < -1e-12) return;  // infeasible basis
            total += alloc[k] * cost[static_cast<std::size_t>(tree[k].first)][static_cast<std::size_t>(tree[k].second)];
        }
        best = std::min(best, total);
    };

    // enumerate cell subsets of size m+n-1
    std::vector<int> idx(static_cast<std::size_t>(need));
    std::function<void(int, int)> rec = [&](int start, int depth) {
        if (depth == need) {
            chosen.assign(idx.begin(), idx.end());
            evaluate();
            return;
        }
        for (int c = start; c < cells; ++c) {
            idx[static_cast<std::size_t>(depth)] = c;
            rec(c + 1, depth + 1);
        }
    };
    rec(0, 0);
    return best;
}

// ---------------------------------------------------------- dbscan oracle

/// Density-reachability closure by fixpoint iteration.
inline std::vector<int> dbscan_closure(const std::vector<std::vector<double>>& pts, double eps,
                                       int min_samples) {
    const int n = static_cast<int>(pts.size());
    auto dist2 = [&](int a, int b) {
        double s = 0;
        for (std::size_t c = 0; c < pts[static_cast<std::size_t>(a)].size(); ++c) {
            double d = pts[static_cast<std::size_t>(a)][c] - pts[static_cast<std::size_t>(b)][c];
            s += d * d;
        }
        return s;
    };
    std::vector<std::vector<int>> nbr(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j && dist2(i, j) <= eps * eps) nbr[static_cast<std::size_t>(i)].push_back(j);
    std::vector<bool> core(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        core[static_cast<std::size_t>(i)] =
            static_cast<int>(nbr[static_cast<std::size_t>(i)].size()) + 1 >= min_samples;
    // core components by repeated merging
    std::vector<int> comp(static_cast<std::size_t>(n), -1);
    int next = 0;
    for (int i = 0; i < n; ++i) {
        if (!core[static_cast<std::size_t>(i)] || comp[static_cast<std::size_t>(i)] >= 0) continue;
        comp[static_cast<std::size_t>(i)] = next;
        bool changed = true;
        while (changed) {
            changed = false;
            for (int a = 0; a < n; ++a) {
                if (!core[static_cast<std::size_t>(a)] || comp[static_cast<std::size_t>(a)] != next) continue;
                for (int b : nbr[static_cast<std::size_t>(a)]) {
                    if (core[static_cast<std::size_t>(b)] && comp[static_cast<std::size_t>(b)] < 0) {
                        comp[static_cast<std::size_t>(b)] = next;
                        changed = true;
                    }
                }
            }
        }
        ++next;
    }
    // border points: nearest core within eps
    for (int i = 0; i < n; ++i) {
        if (core[static_cast<std::size_t>(i)]) continue;
        int best = -1;
        double bd = 0;
        for (int b : nbr[static_cast<std::size_t>(i)]) {
            if (!core[static_cast<std::size_t>(b)]) continue;
            const double d = dist2(i, b);
            if (best < 0 || d < bd) {
                best = b;
                bd = d;
            }
        }
        if (best >= 0) comp[static_cast<std::size_t>(i)] = comp[static_cast<std::size_t>(best)];
    }
    return comp;
}

/// Partition equality ignoring label numbering; noise (-1) must match.
inline bool same_partition(const std::vector<int>& a, const std::vector<int>& b) {
    if (a.size() != b.size()) return false;
    std::map<int, int> fwd, rev;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if ((a[i] < 0) != (b[i] < 0)) return false;
        if (a[i] < 0) continue;
        auto f = fwd.find(a[i]);
        if (f == fwd.end()) {
            if (rev.count(b[i])) return false;
            fwd[a[i]] = b[i];
            rev[b[i]] = a[i];
        } else if (f->second != b[i]) {
            return false;
        }
    }
    return true;
}

// ----------------------------------------------------------- auprc oracle

/// Walks every distinct threshold explicitly.
inline double auprc_brute(const std::vector<double>& scores, const std::vector<double>& labels) {
    std::vector<double> thresholds = scores;
    std::sort(thresholds.rbegin(), thresholds.rend());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
    double total_pos = 0;
    for (double y : labels) total_pos += y;
    double area = 0, prev_recall = 0;
    for (double t : thresholds) {
        double tp = 0, fp = 0;
        for (std::size_t i = 0; i < scores.size(); ++i) {
            if (scores[i] >= t) {
                if (labels[i] > 0.5) tp += 1;
                else fp += 1;
            }
        }
        const double precision = tp / (tp + fp);
        const double recall = tp / total_pos;
        area += precision * (recall - prev_recall);
        prev_recall = recall;
    }
    return area;
}

}  // namespace oracle
