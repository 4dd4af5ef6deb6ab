#include <catch2/catch_amalgamated.hpp>

#include "tvlnet/align.hpp"
#include "tvlnet/record.hpp"
#include "tvlnet/synth.hpp"

using namespace tvlnet;

TEST_CASE("decimal parse and canonical form") {
    CHECK(Decimal::parse("1000")->micro() == 1000000000);
    CHECK(Decimal::parse("1000.0")->str() == "1000");
    CHECK(Decimal::parse("0.000001")->micro() == 1);
    CHECK(Decimal::parse("-3.5")->str() == "-3.5");
    CHECK(Decimal::parse(".5")->str() == "0.5");
    CHECK(Decimal::parse("1.0000005")->micro() == 1000001);  // rounds half away
    CHECK_FALSE(Decimal::parse(""));
    CHECK_FALSE(Decimal::parse("abc"));
    CHECK_FALSE(Decimal::parse("1e5"));
    CHECK_FALSE(Decimal::parse("1.2.3"));
}

TEST_CASE("decimal arithmetic is exact and order independent") {
    Rng rng(17);
    std::vector<Decimal> values;
    for (int i = 0; i < 200; ++i)
        values.push_back(Decimal::from_micro(static_cast<std::int64_t>(rng.below(1'000'000'000))));
    Decimal fwd, rev;
    for (const auto& v : values) fwd += v;
    for (auto it = values.rbegin(); it != values.rend(); ++it) rev += *it;
    CHECK(fwd == rev);
    CHECK(Decimal::parse(fwd.str()).value() == fwd);
}

TEST_CASE("csv quoting round trip") {
    std::vector<std::string> fields = {"plain", "with,comma", "with\"quote", "multi\nline", ""};
    auto rows = parse_csv(csv_row(fields));
    REQUIRE(rows.size() == 1);
    CHECK(rows[0] == fields);
}

TEST_CASE("parse_records maps fields and rejects bad rows") {
    const std::string text =
        "protocol_id,chain_id,token_id,timestamp,amount,usd_value\n"
        "aave,ethereum,USDC,1700000000,1000,1000.0\n";
    auto out = parse_records(text, RecordFormat::Csv);
    REQUIRE(out.records.size() == 1);
    CHECK(out.rejections.empty());
    const TvlRecord& r = out.records[0];
    CHECK(r.protocol_id == "aave");
    CHECK(r.chain_id == "ethereum");
    CHECK(r.token_id == "USDC");
    CHECK(r.timestamp == 1700000000);
    CHECK(r.amount == Decimal::from_int(1000));
    CHECK(r.usd_value == Decimal::from_int(1000));
}

TEST_CASE("negative values are rejected with the row intact") {
    const std::string text =
        "protocol_id,chain_id,token_id,timestamp,amount,usd_value\n"
        "aave,ethereum,USDC,1700000000,1000,-5\n"
        "lido,ethereum,STETH,1700000000,2,2\n";
    auto out = parse_records(text, RecordFormat::Csv);
    CHECK(out.records.size() == 1);
    REQUIRE(out.rejections.size() == 1);
    CHECK(out.rejections[0].line == 2);
    CHECK(out.rejections[0].reason == RejectReason::NegativeUsdValue);
}

TEST_CASE("empty input gives empty lists") {
    auto out = parse_records("", RecordFormat::Csv);
    CHECK(out.records.empty());
    CHECK(out.rejections.empty());
    auto out_json = parse_records("", RecordFormat::Json);
    CHECK(out_json.records.empty());
}

TEST_CASE("duplicate keys are rejected") {
    const std::string text =
        "protocol_id,chain_id,token_id,timestamp,amount,usd_value\n"
        "a,c,x,100,1,1\n"
        "a,c,x,100,2,2\n";
    auto out = parse_records(text, RecordFormat::Csv);
    CHECK(out.records.size() == 1);
    REQUIRE(out.rejections.size() == 1);
    CHECK(out.rejections[0].reason == RejectReason::DuplicateKey);
}

TEST_CASE("record serialization round trips in both formats") {
    Rng rng(5);
    std::vector<TvlRecord> records;
    for (int i = 0; i < 40; ++i) {
        TvlRecord r;
        r.protocol_id = "p" + std::to_string(rng.below(6));
        r.chain_id = "c" + std::to_string(rng.below(3));
        r.token_id = "t" + std::to_string(i);
        r.timestamp = 1600000000 + static_cast<std::int64_t>(rng.below(1000000));
        r.amount = Decimal::from_micro(static_cast<std::int64_t>(rng.below(1'000'000'000'000)));
        r.usd_value = Decimal::from_micro(static_cast<std::int64_t>(rng.below(1'000'000'000'000)));
        records.push_back(r);
    }
    for (auto fmt : {RecordFormat::Csv, RecordFormat::Json}) {
        auto parsed = parse_records(serialize_records(records, fmt), fmt);
        CHECK(parsed.rejections.empty());
        CHECK(parsed.records == records);
    }
}

namespace {
TvlRecord rec(const char* p, const char* x, std::int64_t ts, std::int64_t usd) {
    TvlRecord r;
    r.protocol_id = p;
    r.chain_id = "c0";
    r.token_id = x;
    r.timestamp = ts;
    r.amount = Decimal::from_int(usd);
    r.usd_value = Decimal::from_int(usd);
    return r;
}
}  // namespace

TEST_CASE("align picks the nearest record within tolerance") {
    // records at t=100 and t=103 with tau=10, delta=4, grid at 100
    auto table = align({rec("p", "x", 100, 7), rec("p", "x", 103, 9)}, 10, 4);
    REQUIRE(table.steps == 1);
    const auto& samples = table.series.at(SeriesKey{"p", "c0", "x"});
    REQUIRE(samples.count(0) == 1);
    CHECK(samples.at(0).usd_value == Decimal::from_int(7));
}

TEST_CASE("align breaks exact-distance ties toward the earlier record") {
    auto table = align({rec("p", "x", 104, 9), rec("p", "x", 96, 7)}, 10, 4,
                       std::int64_t{100}, std::int64_t{100});
    const auto& samples = table.series.at(SeriesKey{"p", "c0", "x"});
    REQUIRE(samples.count(0) == 1);
    CHECK(samples.at(0).usd_value == Decimal::from_int(7));  // t=96 wins
}

TEST_CASE("grid points with no record within delta are gaps") {
    auto table = align({rec("p", "x", 100, 7), rec("p", "x", 126, 9)}, 10, 4,
                       std::int64_t{100}, std::int64_t{130});
    const auto& samples = table.series.at(SeriesKey{"p", "c0", "x"});
    CHECK(table.steps == 4);
    CHECK(samples.count(0) == 1);
    CHECK(samples.count(1) == 0);  // nothing near 110
    CHECK(samples.count(2) == 0);  // 126 is 4 from 130, 6 from 120... within delta of 130
    CHECK(samples.count(3) == 1);
}

TEST_CASE("align validates its parameters") {
    CHECK_THROWS_AS(align({}, 0, 0), std::invalid_argument);
    CHECK_THROWS_AS(align({}, 10, 5), std::invalid_argument);  // delta >= tau/2
}

TEST_CASE("align is idempotent on an already aligned series") {
    std::vector<TvlRecord> records;
    for (int k = 0; k < 5; ++k) records.push_back(rec("p", "x", 1000 + 10 * k, 7 + k));
    auto first = align(records, 10, 4);
    // write the aligned samples back to records at the grid times
    std::vector<TvlRecord> again;
    for (const auto& [key, samples] : first.series)
        for (const auto& [k, s] : samples) {
            TvlRecord r;
            r.protocol_id = key.protocol_id;
            r.chain_id = key.chain_id;
            r.token_id = key.token_id;
            r.timestamp = first.grid_time(k);
            r.amount = s.amount;
            r.usd_value = s.usd_value;
            again.push_back(r);
        }
    auto second = align(again, 10, 4);
    CHECK(second.series == first.series);
    CHECK(second.t0 == first.t0);
    CHECK(second.steps == first.steps);
}

TEST_CASE("aligned table round trips through JSON") {
    auto table = align({rec("p", "x", 100, 7), rec("q", "y", 110, 9)}, 10, 4);
    auto back = read_aligned_json(write_aligned_json(table));
    CHECK(back.series == table.series);
    CHECK(back.t0 == table.t0);
    CHECK(back.tau == table.tau);
    CHECK(back.delta == table.delta);
    CHECK(back.steps == table.steps);
}

TEST_CASE("synth is deterministic and validation clean") {
    SynthConfig cfg;
    cfg.n_protocols = 8;
    cfg.n_tokens = 6;
    cfg.n_steps = 10;
    const auto a = synth_dataset(cfg, 42);
    const auto b = synth_dataset(cfg, 42);
    CHECK(serialize_records_csv(a) == serialize_records_csv(b));
    CHECK(a != synth_dataset(cfg, 43));

    auto parsed = parse_records(serialize_records_csv(a), RecordFormat::Csv);
    CHECK(parsed.rejections.empty());
    CHECK(parsed.records.size() == a.size());
}

TEST_CASE("synth shock halves affected values at the shock date") {
    SynthConfig cfg;
    cfg.n_protocols = 8;
    cfg.n_tokens = 6;
    cfg.n_steps = 10;
    cfg.recovery_weeks = 3;
    SynthConfig shocked = cfg;
    const int shock_step = 5;
    shocked.shocks.push_back(
        {cfg.t0 + shock_step * cfg.tau, synth_sector(cfg, 0), 0.5});

    const auto base = synth_dataset(cfg, 7);
    const auto hit = synth_dataset(shocked, 7);
    REQUIRE(base.size() == hit.size());
    bool checked = false;
    for (std::size_t i = 0; i < base.size(); ++i) {
        REQUIRE(base[i].token_id == hit[i].token_id);
        if (base[i].timestamp != cfg.t0 + shock_step * cfg.tau) continue;
        if (synth_sector(cfg, 0) !=
            synth_sector(cfg, std::stoi(base[i].protocol_id.substr(4))))
            continue;
        const double ratio = hit[i].usd_value.to_double() / base[i].usd_value.to_double();
        CHECK(ratio == Catch::Approx(0.5).epsilon(1e-6));
        checked = true;
    }
    CHECK(checked);
}

TEST_CASE("synth with zero protocols is empty") {
    SynthConfig cfg;
    cfg.n_protocols = 0;
    CHECK(synth_dataset(cfg, 1).empty());
}

TEST_CASE("synth config parses from TOML-shaped tree") {
    const char* toml =
        "protocols = 5\n"
        "tokens = 4\n"
        "steps = 12\n"
        "t0 = 2022-01-03\n"
        "tau = \"7d\"\n"
        "[[shocks]]\n"
        "date = 2022-02-07\n"
        "sector = \"Asset Management\"\n"
        "magnitude = 0.4\n";
    // parse via config.hpp's TOML reader in the pipeline tests; here via JSON
    const char* json =
        "{\"protocols\": 5, \"tokens\": 4, \"steps\": 12, \"t0\": \"2022-01-03\","
        " \"tau\": \"7d\", \"shocks\": [{\"date\": \"2022-02-07\","
        " \"sector\": \"Asset Management\", \"magnitude\": 0.4}]}";
    (void)toml;
    auto cfg = parse_synth_config(parse_json(json));
    CHECK(cfg.n_protocols == 5);
    CHECK(cfg.tau == 7 * 86400);
    REQUIRE(cfg.shocks.size() == 1);
    CHECK(cfg.shocks[0].magnitude == 0.4);
    CHECK((cfg.shocks[0].date - cfg.t0) % cfg.tau == 0);
}
