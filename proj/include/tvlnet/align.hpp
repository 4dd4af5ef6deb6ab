#pragma once

#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "tvlnet/jval.hpp"
#include "tvlnet/record.hpp"

namespace tvlnet {

struct SeriesKey {
    std::string protocol_id;
    std::string chain_id;
    std::string token_id;

    auto operator<=>(const SeriesKey&) const = default;
};

struct AlignedSample {
    Decimal amount;
    Decimal usd_value;
    bool operator==(const AlignedSample&) const = default;
};

/// Raw observations snapped onto the uniform grid t0 + k*tau. A key with no
/// record within `delta` of a grid point has no entry there (a gap); stock
/// and flow computations treat the token as absent at that grid point.
struct AlignedStateTable {
    std::int64_t t0 = 0;
    std::int64_t tau = 0;
    std::int64_t delta = 0;
    std::int64_t steps = 0;  // grid points are k = 0 .. steps-1
    std::map<SeriesKey, std::map<std::int64_t, AlignedSample>> series;

    std::int64_t grid_time(std::int64_t k) const { return t0 + k * tau; }
};

/// Snaps each record to its nearest grid point within `delta`; when two
/// records compete for one grid point the nearer wins and exact-distance
/// ties go to the earlier record. Pass explicit bounds to pin the grid;
/// by default it spans the records' min..max timestamps.
inline AlignedStateTable align(const std::vector<TvlRecord>& records, std::int64_t tau,
                               std::int64_t delta,
                               std::optional<std::int64_t> t0 = std::nullopt,
                               std::optional<std::int64_t> t_end = std::nullopt) {
    if (tau <= 0) throw std::invalid_argument("align: tau must be positive");
    if (delta < 0 || 2 * delta >= tau)
        throw std::invalid_argument("align: delta must satisfy 0 <= delta < tau/2");

    AlignedStateTable table;
    table.tau = tau;
    table.delta = delta;
    if (records.empty() && !t0) {
        table.steps = 0;
        return table;
    }
    std::int64_t lo = t0 ? *t0 : records.front().timestamp;
    std::int64_t hi = t_end ? *t_end : records.front().timestamp;
    if (!t0 || !t_end) {
        for (const auto& r : records) {
            if (!t0) lo = std::min(lo, r.timestamp);
            if (!t_end) hi = std::max(hi, r.timestamp);
        }
    }
    table.t0 = lo;
    table.steps = hi >= lo ? (hi - lo) / tau + 1 : 0;

    struct Candidate {
        std::int64_t dist;
        std::int64_t timestamp;
        const TvlRecord* rec;
    };
    std::map<SeriesKey, std::map<std::int64_t, Candidate>> best;
    for (const auto& r : records) {
        const std::int64_t off = r.timestamp - table.t0;
        // nearest grid index, clamped into range
        std::int64_t k = off >= 0 ? (off + tau / 2) / tau : -((-off + tau / 2) / tau);
        k = std::max<std::int64_t>(0, std::min(k, table.steps - 1));
        if (table.steps == 0) continue;
        const std::int64_t dist = std::llabs(r.timestamp - table.grid_time(k));
        if (dist > delta) continue;
        SeriesKey key{r.protocol_id, r.chain_id, r.token_id};
        auto& slot = best[key];
        auto it = slot.find(k);
        if (it == slot.end() || dist < it->second.dist ||
            (dist == it->second.dist && r.timestamp < it->second.timestamp)) {
            slot[k] = Candidate{dist, r.timestamp, &r};
        }
    }
    for (auto& [key, cands] : best) {
        auto& dst = table.series[key];
        for (auto& [k, c] : cands) dst[k] = AlignedSample{c.rec->amount, c.rec->usd_value};
    }
    return table;
}

// ------------------------------------------------------------- persistence

inline std::string write_aligned_json(const AlignedStateTable& t) {
    std::string out;
    out += "{\n";
    out += "  \"t0\": " + std::to_string(t.t0) + ",\n";
    out += "  \"tau\": " + std::to_string(t.tau) + ",\n";
    out += "  \"delta\": " + std::to_string(t.delta) + ",\n";
    out += "  \"steps\": " + std::to_string(t.steps) + ",\n";
    out += "  \"series\": [\n";
    std::size_t i = 0;
    for (const auto& [key, samples] : t.series) {
        out += "    {\"protocol_id\": " + json_quote(key.protocol_id);
        out += ", \"chain_id\": " + json_quote(key.chain_id);
        out += ", \"token_id\": " + json_quote(key.token_id);
        out += ", \"samples\": [";
        std::size_t j = 0;
        for (const auto& [k, s] : samples) {
            if (j++) out += ", ";
            out += "[" + std::to_string(k) + ", " + s.amount.str() + ", " + s.usd_value.str() +
                   "]";
        }
        out += ++i < t.series.size() ? "]},\n" : "]}\n";
    }
    out += "  ]\n}\n";
    return out;
}

inline AlignedStateTable read_aligned_json(std::string_view text) {
    JVal root = parse_json(text);
    AlignedStateTable t;
    t.t0 = root.at("t0").as_i64();
    t.tau = root.at("tau").as_i64();
    t.delta = root.at("delta").as_i64();
    t.steps = root.at("steps").as_i64();
    for (const JVal& s : root.at("series").arr) {
        SeriesKey key{s.at("protocol_id").as_str(), s.at("chain_id").as_str(),
                      s.at("token_id").as_str()};
        auto& dst = t.series[key];
        for (const JVal& row : s.at("samples").arr) {
            if (row.arr.size() != 3) throw std::runtime_error("bad aligned sample row");
            dst[row.arr[0].as_i64()] =
                AlignedSample{row.arr[1].as_decimal(), row.arr[2].as_decimal()};
        }
    }
    return t;
}

}  // namespace tvlnet
