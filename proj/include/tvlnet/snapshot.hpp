#pragma once

#include <map>
#include <string>
#include <vector>

#include "tvlnet/csv.hpp"
#include "tvlnet/decimal.hpp"
#include "tvlnet/jval.hpp"

namespace tvlnet {

struct SnapshotNode {
    std::string id;
    Decimal size;
    std::map<std::string, Decimal> composition;  // token -> USD at interval end

    bool operator==(const SnapshotNode&) const = default;
};

struct SnapshotLink {
    std::string source;
    std::string target;
    Decimal size;
    std::map<std::string, Decimal> composition;  // token -> USD contribution

    bool operator==(const SnapshotLink&) const = default;
};

/// One weighted directed credit-exposure graph for a single interval.
/// Nodes are sorted by id and links by (source, target); there is at most
/// one link per ordered pair and every link size is positive.
struct NetworkSnapshot {
    std::string date;  // ISO date of the interval end
    std::vector<SnapshotNode> nodes;
    std::vector<SnapshotLink> links;

    bool operator==(const NetworkSnapshot&) const = default;
};

/// Returns human-readable invariant violations; empty means valid.
inline std::vector<std::string> validate_snapshot(const NetworkSnapshot& s) {
    std::vector<std::string> issues;
    for (std::size_t i = 0; i + 1 < s.nodes.size(); ++i)
        if (!(s.nodes[i].id < s.nodes[i + 1].id))
            issues.push_back("nodes not strictly sorted by id at index " + std::to_string(i));
    for (const auto& n : s.nodes)
        if (n.size.negative()) issues.push_back("negative node size: " + n.id);
    for (std::size_t i = 0; i + 1 < s.links.size(); ++i) {
        const auto& a = s.links[i];
        const auto& b = s.links[i + 1];
        if (!(std::tie(a.source, a.target) < std::tie(b.source, b.target)))
            issues.push_back("links not strictly sorted or duplicated at index " +
                             std::to_string(i));
    }
    for (const auto& l : s.links) {
        if (l.size <= Decimal{})
            issues.push_back("non-positive link size: " + l.source + "->" + l.target);
        Decimal sum;
        for (const auto& [_, v] : l.composition) sum += v;
        if (sum != l.size)
            issues.push_back("link size != composition sum: " + l.source + "->" + l.target);
        if (l.source == l.target) issues.push_back("self-loop: " + l.source);
    }
    return issues;
}

namespace detail {

inline void write_composition(std::string& out, const std::map<std::string, Decimal>& comp) {
    out.push_back('{');
    std::size_t i = 0;
    for (const auto& [token, value] : comp) {
        if (i++) out += ", ";
        out += json_quote(token) + ": " + value.str();
    }
    out.push_back('}');
}

inline std::string composition_flat(const std::map<std::string, Decimal>& comp) {
    std::string out;
    std::size_t i = 0;
    for (const auto& [token, value] : comp) {
        if (i++) out.push_back('|');
        out += token + ":" + value.str();
    }
    return out;
}

inline std::map<std::string, Decimal> parse_composition_flat(std::string_view flat) {
    std::map<std::string, Decimal> comp;
    std::size_t start = 0;
    while (start <= flat.size() && !flat.empty()) {
        std::size_t bar = flat.find('|', start);
        std::string_view item = flat.substr(
            start, bar == std::string_view::npos ? std::string_view::npos : bar - start);
        if (!item.empty()) {
            const std::size_t colon = item.rfind(':');
            if (colon == std::string_view::npos)
                throw std::runtime_error("bad composition item: " + std::string(item));
            auto d = Decimal::parse(item.substr(colon + 1));
            if (!d) throw std::runtime_error("bad composition value: " + std::string(item));
            comp[std::string(item.substr(0, colon))] = *d;
        }
        if (bar == std::string_view::npos) break;
        start = bar + 1;
    }
    return comp;
}

}  // namespace detail

/// Serializes to the snapshot JSON layout: one top-level key per date with
/// `nodes` and `links` arrays. Refuses to serialize an invalid snapshot.
inline std::string write_snapshot_json(const NetworkSnapshot& s) {
    if (auto issues = validate_snapshot(s); !issues.empty())
        throw std::invalid_argument("write_snapshot_json: invalid snapshot: " + issues.front());
    std::string out;
    out += "{" + json_quote(s.date) + ": {\n  \"nodes\": [";
    for (std::size_t i = 0; i < s.nodes.size(); ++i) {
        const auto& n = s.nodes[i];
        out += i ? ",\n    " : "\n    ";
        out += "{\"id\": " + json_quote(n.id) + ", \"size\": " + n.size.str() +
               ", \"composition\": ";
        detail::write_composition(out, n.composition);
        out.push_back('}');
    }
    out += s.nodes.empty() ? "],\n" : "\n  ],\n";
    out += "  \"links\": [";
    for (std::size_t i = 0; i < s.links.size(); ++i) {
        const auto& l = s.links[i];
        out += i ? ",\n    " : "\n    ";
        out += "{\"source\": " + json_quote(l.source) + ", \"target\": " + json_quote(l.target) +
               ", \"size\": " + l.size.str() + ", \"composition\": ";
        detail::write_composition(out, l.composition);
        out.push_back('}');
    }
    out += s.links.empty() ? "]\n}}\n" : "\n  ]\n}}\n";
    return out;
}

inline NetworkSnapshot read_snapshot_json(std::string_view text) {
    JVal root = parse_json(text);
    if (!root.is_obj() || root.obj.size() != 1)
        throw std::runtime_error("snapshot JSON must have exactly one date key");
    NetworkSnapshot s;
    s.date = root.obj.front().first;
    const JVal& body = root.obj.front().second;
    for (const JVal& n : body.at("nodes").arr) {
        SnapshotNode node;
        node.id = n.at("id").as_str();
        node.size = n.at("size").as_decimal();
        for (const auto& [token, v] : n.at("composition").obj)
            node.composition[token] = v.as_decimal();
        s.nodes.push_back(std::move(node));
    }
    for (const JVal& l : body.at("links").arr) {
        SnapshotLink link;
        link.source = l.at("source").as_str();
        link.target = l.at("target").as_str();
        link.size = l.at("size").as_decimal();
        for (const auto& [token, v] : l.at("composition").obj)
            link.composition[token] = v.as_decimal();
        s.links.push_back(std::move(link));
    }
    return s;
}

struct SnapshotCsv {
    std::string nodes_csv;
    std::string links_csv;
};

inline SnapshotCsv write_snapshot_csv(const NetworkSnapshot& s) {
    if (auto issues = validate_snapshot(s); !issues.empty())
        throw std::invalid_argument("write_snapshot_csv: invalid snapshot: " + issues.front());
    SnapshotCsv out;
    out.nodes_csv = "date,id,size,composition\n";
    for (const auto& n : s.nodes)
        out.nodes_csv +=
            csv_row({s.date, n.id, n.size.str(), detail::composition_flat(n.composition)});
    out.links_csv = "date,source,target,size,composition\n";
    for (const auto& l : s.links)
        out.links_csv += csv_row(
            {s.date, l.source, l.target, l.size.str(), detail::composition_flat(l.composition)});
    return out;
}

inline NetworkSnapshot read_snapshot_csv(const SnapshotCsv& csv) {
    NetworkSnapshot s;
    auto nodes = parse_csv(csv.nodes_csv);
    for (std::size_t i = 1; i < nodes.size(); ++i) {
        const auto& row = nodes[i];
        if (row.size() != 4) throw std::runtime_error("bad nodes CSV row");
        s.date = row[0];
        SnapshotNode n;
        n.id = row[1];
        auto d = Decimal::parse(row[2]);
        if (!d) throw std::runtime_error("bad node size");
        n.size = *d;
        n.composition = detail::parse_composition_flat(row[3]);
        s.nodes.push_back(std::move(n));
    }
    auto links = parse_csv(csv.links_csv);
    for (std::size_t i = 1; i < links.size(); ++i) {
        const auto& row = links[i];
        if (row.size() != 5) throw std::runtime_error("bad links CSV row");
        s.date = row[0];
        SnapshotLink l;
        l.source = row[1];
        l.target = row[2];
        auto d = Decimal::parse(row[3]);
        if (!d) throw std::runtime_error("bad link size");
        l.size = *d;
        l.composition = detail::parse_composition_flat(row[4]);
        s.links.push_back(std::move(l));
    }
    return s;
}

}  // namespace tvlnet
