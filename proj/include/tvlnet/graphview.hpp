#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "tvlnet/snapshot.hpp"

namespace tvlnet {

/// Indexed adjacency built once from a snapshot and shared by the metric,
/// curvature, and feature computations.
struct GraphView {
    std::vector<std::string> ids;  // node index -> id, in snapshot (sorted) order
    std::map<std::string, int> index;

    struct Edge {
        int src;
        int dst;
        double weight;
    };
    std::vector<Edge> edges;  // directed links as given

    std::vector<std::vector<int>> out_adj;
    std::vector<std::vector<int>> in_adj;
    std::vector<std::vector<int>> und_adj;            // unique neighbors, sorted
    std::vector<std::pair<int, int>> und_edges;       // u < v, unique
    std::vector<double> und_weight;                   // per und_edge, both directions summed
    std::vector<double> node_size;

    int n() const { return static_cast<int>(ids.size()); }
    int total_degree(int v) const {
        return static_cast<int>(out_adj[static_cast<std::size_t>(v)].size() +
                                in_adj[static_cast<std::size_t>(v)].size());
    }
};

inline GraphView build_graph_view(const NetworkSnapshot& s) {
    GraphView g;
    g.ids.reserve(s.nodes.size());
    for (const auto& n : s.nodes) {
        g.index[n.id] = static_cast<int>(g.ids.size());
        g.ids.push_back(n.id);
        g.node_size.push_back(n.size.to_double());
    }
    // links may reference ids not present in nodes when callers assemble
    // snapshots by hand; give those implicit zero-size nodes
    for (const auto& l : s.links) {
        for (const std::string* id : {&l.source, &l.target}) {
            if (!g.index.count(*id)) {
                g.index[*id] = static_cast<int>(g.ids.size());
                g.ids.push_back(*id);
                g.node_size.push_back(0.0);
            }
        }
    }
    const std::size_t n = g.ids.size();
    g.out_adj.assign(n, {});
    g.in_adj.assign(n, {});
    g.und_adj.assign(n, {});

    std::map<std::pair<int, int>, double> und;
    for (const auto& l : s.links) {
        GraphView::Edge e{g.index[l.source], g.index[l.target], l.size.to_double()};
        if (e.src == e.dst) continue;
        g.edges.push_back(e);
        g.out_adj[static_cast<std::size_t>(e.src)].push_back(e.dst);
        g.in_adj[static_cast<std::size_t>(e.dst)].push_back(e.src);
        auto key = std::minmax(e.src, e.dst);
        und[{key.first, key.second}] += e.weight;
    }
    for (const auto& [uv, w] : und) {
        g.und_edges.push_back(uv);
        g.und_weight.push_back(w);
        g.und_adj[static_cast<std::size_t>(uv.first)].push_back(uv.second);
        g.und_adj[static_cast<std::size_t>(uv.second)].push_back(uv.first);
    }
    for (auto& adj : g.und_adj) std::sort(adj.begin(), adj.end());
    return g;
}

}  // namespace tvlnet
