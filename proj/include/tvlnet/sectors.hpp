#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tvlnet/categories.hpp"
#include "tvlnet/csv.hpp"
#include "tvlnet/graphview.hpp"
#include "tvlnet/snapshot.hpp"

namespace tvlnet {

/// Protocol -> category -> broad sector, total by construction: anything
/// unmapped lands in "Others".
struct SectorMap {
    std::map<std::string, std::string> category_to_sector;
    std::map<std::string, std::string> protocol_to_category;

    std::string sector_of(const std::string& protocol) const {
        auto c = protocol_to_category.find(protocol);
        if (c == protocol_to_category.end()) return kSectorOthers;
        auto s = category_to_sector.find(c->second);
        return s == category_to_sector.end() ? kSectorOthers : s->second;
    }
};

inline SectorMap load_sector_map(std::string_view sector_csv, std::string_view categories_csv) {
    SectorMap m;
    auto rows = parse_csv(sector_csv);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (i == 0 && !rows[i].empty() && rows[i][0] == "category") continue;
        if (rows[i].size() != 2)
            throw std::runtime_error("sector map: expected 2 columns at row " +
                                     std::to_string(i + 1));
        m.category_to_sector[rows[i][0]] = rows[i][1];
    }
    auto cat_rows = parse_csv(categories_csv);
    for (std::size_t i = 0; i < cat_rows.size(); ++i) {
        if (i == 0 && !cat_rows[i].empty() && cat_rows[i][0] == "protocol_id") continue;
        if (cat_rows[i].size() != 2)
            throw std::runtime_error("categories: expected 2 columns at row " +
                                     std::to_string(i + 1));
        m.protocol_to_category[cat_rows[i][0]] = cat_rows[i][1];
    }
    return m;
}

inline SectorMap default_sector_map(std::map<std::string, std::string> protocol_categories) {
    SectorMap m;
    m.category_to_sector = default_category_sectors();
    m.protocol_to_category = std::move(protocol_categories);
    return m;
}

// ----------------------------------------------------------------- flows

/// Which link direction counts as sector exposure expansion. `Inbound`
/// reads a link into the sector as expansion (the default interpretation);
/// `Outbound` flips it.
enum class FlowOrientation { Inbound, Outbound };

inline std::optional<FlowOrientation> parse_orientation(std::string_view s) {
    if (s == "in" || s == "inbound") return FlowOrientation::Inbound;
    if (s == "out" || s == "outbound") return FlowOrientation::Outbound;
    return std::nullopt;
}

struct SectorFlowPoint {
    std::string date;
    std::string sector;
    Decimal expansion;    // F_i
    Decimal contraction;  // F_o
    std::optional<double> rho;  // (F_i - F_o) / (F_i + F_o), absent when both zero
};

/// Cross-sector exposure shifts per snapshot. Intra-sector links are
/// excluded unless `include_intra`, in which case they count toward both
/// sides of their sector.
inline std::vector<SectorFlowPoint> sector_flows(
    const std::vector<NetworkSnapshot>& snapshots, const SectorMap& map,
    FlowOrientation orientation = FlowOrientation::Inbound, bool include_intra = false) {
    std::vector<SectorFlowPoint> out;
    for (const auto& snap : snapshots) {
        std::map<std::string, std::pair<Decimal, Decimal>> acc;  // sector -> (in, out)
        for (const auto& n : snap.nodes) acc.try_emplace(map.sector_of(n.id));
        for (const auto& l : snap.links) {
            const std::string ss = map.sector_of(l.source);
            const std::string ts = map.sector_of(l.target);
            if (ss == ts && !include_intra) continue;
            acc[ts].first += l.size;
            acc[ss].second += l.size;
        }
        for (const auto& [sector, f] : acc) {
            SectorFlowPoint p;
            p.date = snap.date;
            p.sector = sector;
            p.expansion = orientation == FlowOrientation::Inbound ? f.first : f.second;
            p.contraction = orientation == FlowOrientation::Inbound ? f.second : f.first;
            const Decimal total = p.expansion + p.contraction;
            if (!total.zero())
                p.rho = (p.expansion - p.contraction).to_double() / total.to_double();
            out.push_back(std::move(p));
        }
    }
    return out;
}

/// Sector-by-sector flow matrix for one snapshot (the chord-diagram data):
/// entry (from, to) aggregates link sizes across the sector pair, diagonal
/// included.
inline std::map<std::pair<std::string, std::string>, Decimal> sector_matrix(
    const NetworkSnapshot& snap, const SectorMap& map) {
    std::map<std::pair<std::string, std::string>, Decimal> m;
    for (const auto& l : snap.links)
        m[{map.sector_of(l.source), map.sector_of(l.target)}] += l.size;
    return m;
}

inline std::string sector_flows_csv(const std::vector<SectorFlowPoint>& points) {
    std::string out = "date,sector,expansion,contraction,rho\n";
    for (const auto& p : points) {
        std::string rho;
        if (p.rho) {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.12g", *p.rho);
            rho = buf;
        }
        out += csv_row({p.date, p.sector, p.expansion.str(), p.contraction.str(), rho});
    }
    return out;
}

// ---------------------------------------------------------------- bridges

/// Bridges (cut edges) of the undirected projection: removing one increases
/// the number of connected components. Iterative Tarjan lowlink pass.
inline std::vector<std::pair<int, int>> bridges(const GraphView& g) {
    const int n = g.n();
    std::vector<std::vector<std::pair<int, int>>> adj(static_cast<std::size_t>(n));
    for (std::size_t ei = 0; ei < g.und_edges.size(); ++ei) {
        const auto [u, v] = g.und_edges[ei];
        adj[static_cast<std::size_t>(u)].push_back({v, static_cast<int>(ei)});
        adj[static_cast<std::size_t>(v)].push_back({u, static_cast<int>(ei)});
    }
    std::vector<int> disc(static_cast<std::size_t>(n), -1);
    std::vector<int> low(static_cast<std::size_t>(n), 0);
    std::vector<std::pair<int, int>> result;
    int timer = 0;

    struct Frame {
        int node;
        int via_edge;
        std::size_t next_child;
    };
    for (int root = 0; root < n; ++root) {
        if (disc[static_cast<std::size_t>(root)] >= 0) continue;
        std::vector<Frame> stack{{root, -1, 0}};
        disc[static_cast<std::size_t>(root)] = low[static_cast<std::size_t>(root)] = timer++;
        while (!stack.empty()) {
            Frame& f = stack.back();
            const auto& edges = adj[static_cast<std::size_t>(f.node)];
            if (f.next_child < edges.size()) {
                const auto [to, eid] = edges[f.next_child++];
                if (eid == f.via_edge) continue;
                if (disc[static_cast<std::size_t>(to)] < 0) {
                    disc[static_cast<std::size_t>(to)] = low[static_cast<std::size_t>(to)] =
                        timer++;
                    stack.push_back({to, eid, 0});
                } else {
                    low[static_cast<std::size_t>(f.node)] = std::min(
                        low[static_cast<std::size_t>(f.node)], disc[static_cast<std::size_t>(to)]);
                }
            } else {
                const int child = f.node;
                const int via = f.via_edge;
                stack.pop_back();
                if (!stack.empty()) {
                    const int parent = stack.back().node;
                    low[static_cast<std::size_t>(parent)] = std::min(
                        low[static_cast<std::size_t>(parent)], low[static_cast<std::size_t>(child)]);
                    if (low[static_cast<std::size_t>(child)] > disc[static_cast<std::size_t>(parent)])
                        result.push_back(g.und_edges[static_cast<std::size_t>(via)]);
                }
            }
        }
    }
    std::sort(result.begin(), result.end());
    return result;
}

// ----------------------------------------------------------- incident table

/// Net exposure change per node: total inbound minus total outbound link
/// size.
inline std::map<std::string, Decimal> net_exposure_change(const NetworkSnapshot& snap) {
    std::map<std::string, Decimal> net;
    for (const auto& n : snap.nodes) net.try_emplace(n.id);
    for (const auto& l : snap.links) {
        net[l.target] += l.size;
        net[l.source] -= l.size;
    }
    return net;
}

struct IncidentRow {
    int week_offset = 0;
    std::string date;
    std::string sector;
    std::string top_protocol;      // largest |net exposure change| in sector
    Decimal net_change;
    std::string cut_edge_source;   // largest bridge touching the sector
    std::string cut_edge_target;
    Decimal cut_edge_size;
    std::string note;              // set when a column is absent
};

/// Weekly protocol-level diagnostics around an event. For each requested
/// sector and week: the protocol with the largest absolute net exposure
/// change, and the heaviest cut edge incident to the sector (reported in
/// the direction of its larger directed link). Ties break by id.
inline std::vector<IncidentRow> incident_table(const std::vector<NetworkSnapshot>& snapshots,
                                               const SectorMap& map,
                                               const std::vector<std::string>& sectors,
                                               const std::string& event_date, int window) {
    std::map<std::string, std::size_t> by_date;
    for (std::size_t i = 0; i < snapshots.size(); ++i) by_date[snapshots[i].date] = i;
    auto it = by_date.find(event_date);
    if (it == by_date.end())
        throw std::invalid_argument("incident_table: no snapshot dated " + event_date);
    const std::ptrdiff_t center = static_cast<std::ptrdiff_t>(it->second);

    std::vector<IncidentRow> rows;
    for (int off = -window; off <= window; ++off) {
        const std::ptrdiff_t idx = center + off;
        if (idx < 0 || idx >= static_cast<std::ptrdiff_t>(snapshots.size())) continue;
        const NetworkSnapshot& snap = snapshots[static_cast<std::size_t>(idx)];
        const auto net = net_exposure_change(snap);
        const GraphView g = build_graph_view(snap);
        const auto cut = bridges(g);

        // directed sizes per ordered pair, for reporting bridge direction
        std::map<std::pair<std::string, std::string>, Decimal> directed;
        for (const auto& l : snap.links) directed[{l.source, l.target}] = l.size;

        for (const auto& sector : sectors) {
            IncidentRow row;
            row.week_offset = off;
            row.date = snap.date;
            row.sector = sector;

            const std::string* best_protocol = nullptr;
            Decimal best_net;
            for (const auto& [id, change] : net) {
                if (map.sector_of(id) != sector) continue;
                if (!best_protocol || change.abs() > best_net.abs() ||
                    (change.abs() == best_net.abs() && id < *best_protocol)) {
                    best_protocol = &id;
                    best_net = change;
                }
            }
            if (best_protocol) {
                row.top_protocol = *best_protocol;
                row.net_change = best_net;
            } else {
                row.note = "sector absent";
            }

            const std::pair<int, int>* best_edge = nullptr;
            Decimal best_size;
            for (const auto& e : cut) {
                const std::string& a = g.ids[static_cast<std::size_t>(e.first)];
                const std::string& b = g.ids[static_cast<std::size_t>(e.second)];
                if (map.sector_of(a) != sector && map.sector_of(b) != sector) continue;
                Decimal size;
                if (auto d = directed.find({a, b}); d != directed.end()) size += d->second;
                if (auto d = directed.find({b, a}); d != directed.end()) size += d->second;
                if (!best_edge || size > best_size) {
                    best_edge = &e;
                    best_size = size;
                }
            }
            if (best_edge) {
                const std::string& a = g.ids[static_cast<std::size_t>(best_edge->first)];
                const std::string& b = g.ids[static_cast<std::size_t>(best_edge->second)];
                Decimal ab, ba;
                if (auto d = directed.find({a, b}); d != directed.end()) ab = d->second;
                if (auto d = directed.find({b, a}); d != directed.end()) ba = d->second;
                if (ab >= ba) {
                    row.cut_edge_source = a;
                    row.cut_edge_target = b;
                } else {
                    row.cut_edge_source = b;
                    row.cut_edge_target = a;
                }
                row.cut_edge_size = best_size;
            } else if (row.note.empty()) {
                row.note = "no cut edge";
            }
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

inline std::string incident_csv(const std::vector<IncidentRow>& rows) {
    std::string out =
        "week,date,sector,top_protocol,net_change,cut_edge_source,cut_edge_target,"
        "cut_edge_size,note\n";
    for (const auto& r : rows)
        out += csv_row({std::to_string(r.week_offset), r.date, r.sector, r.top_protocol,
                        r.top_protocol.empty() ? "" : r.net_change.str(), r.cut_edge_source,
                        r.cut_edge_target,
                        r.cut_edge_source.empty() ? "" : r.cut_edge_size.str(), r.note});
    return out;
}

inline std::string sector_matrix_csv(
    const std::map<std::pair<std::string, std::string>, Decimal>& m, const std::string& date) {
    std::string out = "date,from_sector,to_sector,size\n";
    for (const auto& [key, size] : m)
        out += csv_row({date, key.first, key.second, size.str()});
    return out;
}

}  // namespace tvlnet
