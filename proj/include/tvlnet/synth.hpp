#pragma once

#include <array>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "tvlnet/categories.hpp"
#include "tvlnet/jval.hpp"
#include "tvlnet/record.hpp"
#include "tvlnet/util.hpp"

namespace tvlnet {

struct SynthShock {
    std::int64_t date = 0;  // epoch seconds, must land on the grid
    std::string sector;     // broad sector whose protocols take the hit
    double magnitude = 0.5; // multiplier applied at the shock week
};

struct SynthConfig {
    int n_protocols = 20;
    int n_tokens = 12;
    int n_steps = 40;
    std::int64_t t0 = 1641168000;  // 2022-01-03
    std::int64_t tau = 7 * 86400;
    int tokens_per_protocol = 4;
    int n_chains = 2;
    double base_value_min = 1.0e5;
    double base_value_max = 5.0e7;
    double drift_min = -0.03;
    double drift_max = 0.05;
    int recovery_weeks = 3;
    std::vector<SynthShock> shocks;
};

namespace detail {

inline const std::array<const char*, 8>& synth_categories() {
    static const std::array<const char*, 8> cats = {
        "Yield",     "Dexes", "Lending", "Oracle",
        "Liquid Staking", "Derivatives", "CDP", "Chain"};
    return cats;
}

inline std::string synth_name(const char* prefix, int i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s%03d", prefix, i);
    return buf;
}

}  // namespace detail

inline std::string synth_protocol_name(int i) { return detail::synth_name("prot", i); }
inline std::string synth_token_name(int i) { return detail::synth_name("tok", i); }

inline std::string synth_category(const SynthConfig& cfg, int protocol_idx) {
    (void)cfg;
    const auto& cats = detail::synth_categories();
    return cats[static_cast<std::size_t>(protocol_idx) % cats.size()];
}

inline std::string synth_sector(const SynthConfig& cfg, int protocol_idx) {
    const auto& m = default_category_sectors();
    auto it = m.find(synth_category(cfg, protocol_idx));
    return it == m.end() ? std::string(kSectorOthers) : it->second;
}

inline int synth_issuer(const SynthConfig& cfg, int token_idx) {
    return token_idx % cfg.n_protocols;
}

/// Tokens resolvable from metadata (the common case). Every seventh token is
/// left out so the text-similarity stage has work; every token at index
/// 6 mod 7 gets a standalone description and falls through to stage four.
inline bool synth_token_in_metadata(int token_idx) {
    const int r = token_idx % 7;
    return r != 3 && r != 6;
}

inline bool synth_token_is_standalone(int token_idx) { return token_idx % 7 == 6; }

inline std::map<std::string, std::string> synth_token_metadata(const SynthConfig& cfg) {
    std::map<std::string, std::string> m;
    for (int j = 0; j < cfg.n_tokens; ++j) {
        if (cfg.n_protocols == 0) break;
        if (synth_token_in_metadata(j))
            m[synth_token_name(j)] = synth_protocol_name(synth_issuer(cfg, j));
    }
    return m;
}

inline std::map<std::string, std::string> synth_protocol_categories(const SynthConfig& cfg) {
    std::map<std::string, std::string> m;
    for (int i = 0; i < cfg.n_protocols; ++i) m[synth_protocol_name(i)] = synth_category(cfg, i);
    return m;
}

struct SynthTexts {
    std::map<std::string, std::string> token_docs;
    std::map<std::string, std::string> protocol_docs;
};

inline SynthTexts synth_texts(const SynthConfig& cfg) {
    SynthTexts t;
    for (int i = 0; i < cfg.n_protocols; ++i) {
        const std::string name = synth_protocol_name(i);
        t.protocol_docs[name] = "defi protocol " + name + " operating " +
                                to_lower(synth_category(cfg, i)) + " pools and vault strategies";
    }
    for (int j = 0; j < cfg.n_tokens; ++j) {
        const std::string name = synth_token_name(j);
        if (cfg.n_protocols > 0 && !synth_token_in_metadata(j) && !synth_token_is_standalone(j)) {
            const std::string issuer = synth_protocol_name(synth_issuer(cfg, j));
            t.token_docs[name] = "receipt token minted by defi protocol " + issuer +
                                 " vault strategies";
        } else {
            t.token_docs[name] = "standalone wrapped asset " + name + " bridged collateral";
        }
    }
    return t;
}

/// Deterministic weekly TVL panel: multiplicative random-walk trends per
/// (protocol, token) holding, optionally split across two chains, with
/// scheduled sector shocks that drop value at the shock week and climb back
/// to trend over `recovery_weeks`. Prices are pinned at 1 USD so `amount`
/// equals `usd_value` and all values are exactly representable.
inline std::vector<TvlRecord> synth_dataset(const SynthConfig& cfg, std::uint64_t seed) {
    std::vector<TvlRecord> out;
    if (cfg.n_protocols <= 0 || cfg.n_tokens <= 0 || cfg.n_steps <= 0) return out;

    Rng rng(derive_seed(seed, "synth"));

    struct Holding {
        int protocol;
        int token;
        std::vector<double> trend;   // per step, before shocks
        std::vector<double> split;   // fraction on chain 0
    };
    std::vector<Holding> holdings;
    for (int p = 0; p < cfg.n_protocols; ++p) {
        // sample distinct tokens for this protocol
        std::vector<int> pool(static_cast<std::size_t>(cfg.n_tokens));
        for (int j = 0; j < cfg.n_tokens; ++j) pool[static_cast<std::size_t>(j)] = j;
        const int take = std::min(cfg.tokens_per_protocol, cfg.n_tokens);
        for (int k = 0; k < take; ++k) {
            const auto pick = k + static_cast<int>(rng.below(pool.size() - static_cast<std::size_t>(k)));
            std::swap(pool[static_cast<std::size_t>(k)], pool[static_cast<std::size_t>(pick)]);
        }
        for (int k = 0; k < take; ++k) {
            Holding h;
            h.protocol = p;
            h.token = pool[static_cast<std::size_t>(k)];
            double v = rng.range(cfg.base_value_min, cfg.base_value_max);
            h.trend.resize(static_cast<std::size_t>(cfg.n_steps));
            h.split.resize(static_cast<std::size_t>(cfg.n_steps));
            const bool two_chains = cfg.n_chains > 1 && rng.unit() < 0.5;
            for (int s = 0; s < cfg.n_steps; ++s) {
                h.trend[static_cast<std::size_t>(s)] = v;
                h.split[static_cast<std::size_t>(s)] = two_chains ? 0.6 : 1.0;
                v *= 1.0 + rng.range(cfg.drift_min, cfg.drift_max);
            }
            holdings.push_back(std::move(h));
        }
    }

    // shock factor per (protocol, step)
    auto shock_factor = [&](int p, int step) {
        double f = 1.0;
        const std::string sec = synth_sector(cfg, p);
        for (const auto& sh : cfg.shocks) {
            if (sh.sector != sec) continue;
            const std::int64_t kd = (sh.date - cfg.t0 + cfg.tau / 2) / cfg.tau;
            if (step < kd) continue;
            const int weeks_since = static_cast<int>(step - kd);
            const double back = cfg.recovery_weeks <= 0
                                    ? (weeks_since > 0 ? 1.0 : 0.0)
                                    : std::min(1.0, static_cast<double>(weeks_since) /
                                                        cfg.recovery_weeks);
            f *= sh.magnitude + (1.0 - sh.magnitude) * back;
        }
        return f;
    };

    for (int s = 0; s < cfg.n_steps; ++s) {
        const std::int64_t ts = cfg.t0 + static_cast<std::int64_t>(s) * cfg.tau;
        for (const auto& h : holdings) {
            const double value =
                h.trend[static_cast<std::size_t>(s)] * shock_factor(h.protocol, s);
            const double split = h.split[static_cast<std::size_t>(s)];
            const int chains = split < 1.0 ? 2 : 1;
            for (int c = 0; c < chains; ++c) {
                const double part = chains == 1 ? value : (c == 0 ? value * split
                                                                  : value * (1.0 - split));
                TvlRecord r;
                r.protocol_id = synth_protocol_name(h.protocol);
                r.chain_id = detail::synth_name("chain", c);
                r.token_id = synth_token_name(h.token);
                r.timestamp = ts;
                r.usd_value = Decimal::from_double(part);
                r.amount = r.usd_value;  // unit price
                out.push_back(std::move(r));
            }
        }
    }
    return out;
}

// -------------------------------------------------------------- config io

inline SynthConfig parse_synth_config(const JVal& v) {
    SynthConfig cfg;
    if (!v.is_obj()) throw std::runtime_error("synth config must be a table/object");
    for (const auto& [key, val] : v.obj) {
        if (key == "protocols") cfg.n_protocols = static_cast<int>(val.as_i64());
        else if (key == "tokens") cfg.n_tokens = static_cast<int>(val.as_i64());
        else if (key == "steps") cfg.n_steps = static_cast<int>(val.as_i64());
        else if (key == "t0") {
            auto d = val.is_str() ? parse_iso_date(val.as_str())
                                  : std::optional<std::int64_t>(val.as_i64());
            if (!d) throw std::runtime_error("synth config: bad t0 date");
            cfg.t0 = *d;
        } else if (key == "tau") {
            auto d = val.is_str() ? parse_duration(val.as_str())
                                  : std::optional<std::int64_t>(val.as_i64());
            if (!d || *d <= 0) throw std::runtime_error("synth config: bad tau");
            cfg.tau = *d;
        } else if (key == "tokens_per_protocol")
            cfg.tokens_per_protocol = static_cast<int>(val.as_i64());
        else if (key == "chains") cfg.n_chains = static_cast<int>(val.as_i64());
        else if (key == "base_value_min") cfg.base_value_min = val.as_double();
        else if (key == "base_value_max") cfg.base_value_max = val.as_double();
        else if (key == "drift_min") cfg.drift_min = val.as_double();
        else if (key == "drift_max") cfg.drift_max = val.as_double();
        else if (key == "recovery_weeks") cfg.recovery_weeks = static_cast<int>(val.as_i64());
        else if (key == "shocks") {
            for (const JVal& s : val.arr) {
                SynthShock sh;
                const JVal* date = s.find("date");
                const JVal* sector = s.find("sector");
                const JVal* mag = s.find("magnitude");
                if (!date || !sector || !mag)
                    throw std::runtime_error("synth config: shock needs date/sector/magnitude");
                auto d = date->is_str() ? parse_iso_date(date->as_str())
                                        : std::optional<std::int64_t>(date->as_i64());
                if (!d) throw std::runtime_error("synth config: bad shock date");
                sh.date = *d;
                sh.sector = sector->as_str();
                sh.magnitude = mag->as_double();
                cfg.shocks.push_back(std::move(sh));
            }
        } else {
            throw std::runtime_error("synth config: unknown key '" + key + "'");
        }
    }
    if (cfg.n_protocols < 0 || cfg.n_tokens < 0 || cfg.n_steps < 0)
        throw std::runtime_error("synth config: counts must be non-negative");
    if (cfg.tokens_per_protocol < 1) throw std::runtime_error("synth config: tokens_per_protocol < 1");
    if (cfg.recovery_weeks < 0) throw std::runtime_error("synth config: recovery_weeks < 0");
    for (const auto& sh : cfg.shocks) {
        if (sh.magnitude < 0.0 || sh.magnitude > 1.0)
            throw std::runtime_error("synth config: shock magnitude outside [0,1]");
        if (sh.date < cfg.t0 || (sh.date - cfg.t0) % cfg.tau != 0)
            throw std::runtime_error("synth config: shock date not on the grid");
    }
    return cfg;
}

}  // namespace tvlnet
