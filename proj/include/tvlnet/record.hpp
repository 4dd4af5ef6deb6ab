#pragma once

#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "tvlnet/csv.hpp"
#include "tvlnet/decimal.hpp"
#include "tvlnet/jval.hpp"

namespace tvlnet {

/// One raw TVL observation: protocol p on chain c reports holding `amount`
/// units of token x worth `usd_value` at `timestamp`.
struct TvlRecord {
    std::string protocol_id;
    std::string chain_id;
    std::string token_id;
    std::int64_t timestamp = 0;  // UTC seconds
    Decimal amount;
    Decimal usd_value;

    auto key() const { return std::tie(protocol_id, chain_id, token_id, timestamp); }
    bool operator==(const TvlRecord&) const = default;
};

enum class RejectReason {
    BadFieldCount,
    MissingField,
    BadTimestamp,
    BadAmount,
    BadUsdValue,
    NegativeAmount,
    NegativeUsdValue,
    DuplicateKey,
};

inline const char* to_string(RejectReason r) {
    switch (r) {
        case RejectReason::BadFieldCount: return "bad_field_count";
        case RejectReason::MissingField: return "missing_field";
        case RejectReason::BadTimestamp: return "bad_timestamp";
        case RejectReason::BadAmount: return "bad_amount";
        case RejectReason::BadUsdValue: return "bad_usd_value";
        case RejectReason::NegativeAmount: return "negative_amount";
        case RejectReason::NegativeUsdValue: return "negative_usd_value";
        case RejectReason::DuplicateKey: return "duplicate_key";
    }
    return "unknown";
}

struct RecordRejection {
    std::size_t line = 0;  // 1-based source line (CSV) or array index+1 (JSON)
    RejectReason reason = RejectReason::BadFieldCount;
};

/// Malformed rows are reported, never silently dropped.
struct ParsedRecords {
    std::vector<TvlRecord> records;
    std::vector<RecordRejection> rejections;
};

enum class RecordFormat { Csv, Json };

inline constexpr std::string_view kRecordCsvHeader =
    "protocol_id,chain_id,token_id,timestamp,amount,usd_value";

namespace detail {

// Validates the numeric fields of a candidate row; returns the failure, if any.
inline std::optional<RejectReason> fill_record(TvlRecord& rec, std::string_view ts,
                                               std::string_view amount,
                                               std::string_view usd) {
    try {
        std::size_t used = 0;
        std::string ts_s(ts);
        long long t = std::stoll(ts_s, &used);
        if (used != ts_s.size()) return RejectReason::BadTimestamp;
        rec.timestamp = t;
    } catch (const std::exception&) {
        return RejectReason::BadTimestamp;
    }
    auto a = Decimal::parse(amount);
    if (!a) return RejectReason::BadAmount;
    auto u = Decimal::parse(usd);
    if (!u) return RejectReason::BadUsdValue;
    if (a->negative()) return RejectReason::NegativeAmount;
    if (u->negative()) return RejectReason::NegativeUsdValue;
    rec.amount = *a;
    rec.usd_value = *u;
    return std::nullopt;
}

}  // namespace detail

inline ParsedRecords parse_records_csv(std::string_view text) {
    ParsedRecords out;
    if (text.empty()) return out;
    auto rows = parse_csv(text);
    if (rows.empty()) return out;
    {
        std::string header;
        for (std::size_t i = 0; i < rows[0].size(); ++i) {
            if (i) header.push_back(',');
            header += rows[0][i];
        }
        if (header != kRecordCsvHeader)
            throw std::runtime_error("unexpected CSV header: " + header);
    }
    std::set<std::tuple<std::string, std::string, std::string, std::int64_t>> seen;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        const std::size_t line = r + 1;
        if (row.size() != 6) {
            out.rejections.push_back({line, RejectReason::BadFieldCount});
            continue;
        }
        TvlRecord rec;
        rec.protocol_id = row[0];
        rec.chain_id = row[1];
        rec.token_id = row[2];
        if (rec.protocol_id.empty() || rec.chain_id.empty() || rec.token_id.empty()) {
            out.rejections.push_back({line, RejectReason::MissingField});
            continue;
        }
        if (auto why = detail::fill_record(rec, row[3], row[4], row[5])) {
            out.rejections.push_back({line, *why});
            continue;
        }
        auto k = std::make_tuple(rec.protocol_id, rec.chain_id, rec.token_id, rec.timestamp);
        if (!seen.insert(k).second) {
            out.rejections.push_back({line, RejectReason::DuplicateKey});
            continue;
        }
        out.records.push_back(std::move(rec));
    }
    return out;
}

inline ParsedRecords parse_records_json(std::string_view text) {
    ParsedRecords out;
    if (text.empty()) return out;
    JVal root = parse_json(text);
    if (!root.is_arr()) throw std::runtime_error("records JSON must be an array");
    std::set<std::tuple<std::string, std::string, std::string, std::int64_t>> seen;
    for (std::size_t i = 0; i < root.arr.size(); ++i) {
        const JVal& o = root.arr[i];
        const std::size_t line = i + 1;
        if (!o.is_obj()) {
            out.rejections.push_back({line, RejectReason::BadFieldCount});
            continue;
        }
        const JVal* p = o.find("protocol_id");
        const JVal* c = o.find("chain_id");
        const JVal* x = o.find("token_id");
        const JVal* t = o.find("timestamp");
        const JVal* a = o.find("amount");
        const JVal* u = o.find("usd_value");
        if (!p || !c || !x || !t || !a || !u || !p->is_str() || !c->is_str() || !x->is_str()) {
            out.rejections.push_back({line, RejectReason::MissingField});
            continue;
        }
        TvlRecord rec;
        rec.protocol_id = p->as_str();
        rec.chain_id = c->as_str();
        rec.token_id = x->as_str();
        if (rec.protocol_id.empty() || rec.chain_id.empty() || rec.token_id.empty()) {
            out.rejections.push_back({line, RejectReason::MissingField});
            continue;
        }
        if (!t->is_num()) {
            out.rejections.push_back({line, RejectReason::BadTimestamp});
            continue;
        }
        if (auto why = detail::fill_record(rec, t->num, a->is_num() ? a->num : "",
                                           u->is_num() ? u->num : "")) {
            out.rejections.push_back({line, *why});
            continue;
        }
        auto k = std::make_tuple(rec.protocol_id, rec.chain_id, rec.token_id, rec.timestamp);
        if (!seen.insert(k).second) {
            out.rejections.push_back({line, RejectReason::DuplicateKey});
            continue;
        }
        out.records.push_back(std::move(rec));
    }
    return out;
}

inline ParsedRecords parse_records(std::string_view text, RecordFormat fmt) {
    return fmt == RecordFormat::Csv ? parse_records_csv(text) : parse_records_json(text);
}

inline std::string serialize_records_csv(const std::vector<TvlRecord>& records) {
    std::string out(kRecordCsvHeader);
    out.push_back('\n');
    for (const auto& r : records) {
        out += csv_row({r.protocol_id, r.chain_id, r.token_id, std::to_string(r.timestamp),
                        r.amount.str(), r.usd_value.str()});
    }
    return out;
}

inline std::string serialize_records_json(const std::vector<TvlRecord>& records) {
    std::string out = "[\n";
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        out += "  {\"protocol_id\": " + json_quote(r.protocol_id);
        out += ", \"chain_id\": " + json_quote(r.chain_id);
        out += ", \"token_id\": " + json_quote(r.token_id);
        out += ", \"timestamp\": " + std::to_string(r.timestamp);
        out += ", \"amount\": " + r.amount.str();
        out += ", \"usd_value\": " + r.usd_value.str();
        out += i + 1 < records.size() ? "},\n" : "}\n";
    }
    out += "]\n";
    return out;
}

inline std::string serialize_records(const std::vector<TvlRecord>& records, RecordFormat fmt) {
    return fmt == RecordFormat::Csv ? serialize_records_csv(records)
                                    : serialize_records_json(records);
}

inline std::string rejections_csv(const std::vector<RecordRejection>& rejections) {
    std::string out = "line,reason\n";
    for (const auto& r : rejections)
        out += std::to_string(r.line) + "," + to_string(r.reason) + "\n";
    return out;
}

}  // namespace tvlnet
