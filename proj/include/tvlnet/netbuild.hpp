#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tvlnet/align.hpp"
#include "tvlnet/snapshot.hpp"
#include "tvlnet/tokmap.hpp"
#include "tvlnet/util.hpp"

namespace tvlnet {

/// Total USD stock of protocol p at grid point k: the sum over every
/// (chain, token) sample of p at k. Absent samples contribute nothing, and
/// an unknown protocol is an empty sum.
inline Decimal protocol_stock(const AlignedStateTable& table, const std::string& protocol,
                              std::int64_t k) {
    Decimal total;
    for (auto it = table.series.lower_bound(SeriesKey{protocol, "", ""});
         it != table.series.end() && it->first.protocol_id == protocol; ++it) {
        auto s = it->second.find(k);
        if (s != it->second.end()) total += s->second.usd_value;
    }
    return total;
}

/// Per-token stock change over one interval; present only for tokens with
/// samples at both endpoints.
struct StockDelta {
    std::string protocol_id;
    std::string token_id;
    Decimal v_start;
    Decimal v_end;
    Decimal delta;  // v_end - v_start, exact
};

namespace detail {

/// Chain-aggregated per-(protocol, token) values at the two endpoints.
struct EndpointValues {
    std::optional<Decimal> v1;
    std::optional<Decimal> v2;
};

inline std::map<std::pair<std::string, std::string>, EndpointValues> endpoint_values(
    const AlignedStateTable& table, std::int64_t k1, std::int64_t k2) {
    std::map<std::pair<std::string, std::string>, EndpointValues> out;
    for (const auto& [key, samples] : table.series) {
        auto s1 = samples.find(k1);
        auto s2 = samples.find(k2);
        if (s1 == samples.end() && s2 == samples.end()) continue;
        auto& ev = out[{key.protocol_id, key.token_id}];
        if (s1 != samples.end()) ev.v1 = ev.v1.value_or(Decimal{}) + s1->second.usd_value;
        if (s2 != samples.end()) ev.v2 = ev.v2.value_or(Decimal{}) + s2->second.usd_value;
    }
    return out;
}

}  // namespace detail

inline std::vector<StockDelta> stock_deltas(const AlignedStateTable& table, std::int64_t k1,
                                            std::int64_t k2) {
    std::vector<StockDelta> out;
    for (const auto& [pk, ev] : detail::endpoint_values(table, k1, k2)) {
        if (!ev.v1 || !ev.v2) continue;  // gap at an endpoint: token absent
        out.push_back({pk.first, pk.second, *ev.v1, *ev.v2, *ev.v2 - *ev.v1});
    }
    return out;
}

/// Tokens first seen at the interval end have no start value; `Include`
/// treats them as an exposure expansion from zero, `Exclude` drops them.
/// Tokens that disappear by the interval end are always excluded (gap rule).
enum class NewTokenPolicy { Include, Exclude };

inline std::optional<NewTokenPolicy> parse_new_token_policy(std::string_view s) {
    if (s == "include") return NewTokenPolicy::Include;
    if (s == "exclude") return NewTokenPolicy::Exclude;
    return std::nullopt;
}

/// Builds the credit-exposure snapshot for the interval (k1, k2].
///
/// Node weight is the end-of-interval value of tokens the protocol held at
/// both endpoints; weights under `theta_node` are zeroed. Each (protocol,
/// token) pair with issuer q = M(x), q != p, contributes one directed flow:
/// the sign of the holder's per-token delta picks the direction (loss flows
/// p->q, gain flows q->p) and flows between the same ordered pair sum into
/// a single link with per-token composition. Opposing directions stay as
/// two separate links; they are not netted.
inline NetworkSnapshot build_snapshot(const AlignedStateTable& table,
                                      const TokenProtocolMap& map, std::int64_t k1,
                                      std::int64_t k2, Decimal theta_node = Decimal{},
                                      NewTokenPolicy policy = NewTokenPolicy::Include) {
    if (k2 <= k1) throw std::invalid_argument("build_snapshot: need k2 > k1");

    const auto values = detail::endpoint_values(table, k1, k2);

    std::map<std::string, SnapshotNode> nodes;
    std::map<std::pair<std::string, std::string>, SnapshotLink> links;

    auto ensure_node = [&](const std::string& id) -> SnapshotNode& {
        auto [it, inserted] = nodes.try_emplace(id);
        if (inserted) it->second.id = id;
        return it->second;
    };

    for (const auto& [pk, ev] : values) {
        const auto& [protocol, token] = pk;
        ensure_node(protocol);

        if (ev.v1 && ev.v2) {  // intersection token: counts toward node weight
            auto& node = nodes[protocol];
            node.size += *ev.v2;
            node.composition[token] = *ev.v2;
        }

        std::optional<Decimal> delta;
        if (ev.v1 && ev.v2) {
            delta = *ev.v2 - *ev.v1;
        } else if (!ev.v1 && ev.v2 && policy == NewTokenPolicy::Include) {
            delta = *ev.v2;  // expansion from zero
        }
        if (!delta || delta->zero()) continue;

        const MapEntry* entry = map.find(token);
        if (!entry)
            throw std::runtime_error("build_snapshot: token not in map: " + token);
        const std::string& issuer = entry->protocol_id;
        if (issuer == protocol) continue;  // self-exposure is not an edge

        const bool outflow = delta->negative();
        const Decimal magnitude = delta->abs();
        const std::string& src = outflow ? protocol : issuer;
        const std::string& dst = outflow ? issuer : protocol;
        auto [it, inserted] = links.try_emplace({src, dst});
        if (inserted) {
            it->second.source = src;
            it->second.target = dst;
        }
        it->second.size += magnitude;
        it->second.composition[token] += magnitude;
        ensure_node(issuer);
    }

    NetworkSnapshot s;
    s.date = format_iso_date(table.grid_time(k2));
    s.nodes.reserve(nodes.size());
    for (auto& [_, n] : nodes) {
        if (n.size < theta_node) n.size = Decimal{};  // pruned, kept with zero weight
        s.nodes.push_back(std::move(n));
    }
    s.links.reserve(links.size());
    for (auto& [_, l] : links) s.links.push_back(std::move(l));
    return s;
}

/// One snapshot per consecutive grid pair in [k_from, k_to]; intervals are
/// independent and run in parallel, merged back in interval order.
inline std::vector<NetworkSnapshot> build_snapshot_series(
    const AlignedStateTable& table, const TokenProtocolMap& map, std::int64_t k_from,
    std::int64_t k_to, Decimal theta_node = Decimal{},
    NewTokenPolicy policy = NewTokenPolicy::Include, unsigned workers = 1) {
    if (k_to <= k_from) throw std::invalid_argument("build_snapshot_series: need k_to > k_from");
    const std::size_t n = static_cast<std::size_t>(k_to - k_from);
    std::vector<NetworkSnapshot> out(n);
    parallel_for(n, workers, [&](std::size_t i) {
        const std::int64_t k1 = k_from + static_cast<std::int64_t>(i);
        out[i] = build_snapshot(table, map, k1, k1 + 1, theta_node, policy);
    });
    return out;
}

}  // namespace tvlnet
