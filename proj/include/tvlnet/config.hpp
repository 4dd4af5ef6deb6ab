#pragma once

#include <cctype>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tvlnet/decimal.hpp"
#include "tvlnet/jval.hpp"
#include "tvlnet/netbuild.hpp"
#include "tvlnet/sectors.hpp"
#include "tvlnet/util.hpp"

namespace tvlnet {

// ------------------------------------------------------------ TOML subset
//
// Enough TOML for the config files this tool defines: [section] and
// [[array-of-tables]] headers with dotted paths, key = scalar | array |
// inline table, comments, quoted strings, bare dates. Values parse into
// the same raw-number tree the JSON reader produces.

namespace detail {

inline void toml_skip_ws(std::string_view s, std::size_t& i) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
}

inline JVal toml_scalar(std::string_view raw);

inline JVal toml_value(std::string_view s, std::size_t& i) {
    toml_skip_ws(s, i);
    if (i >= s.size()) throw std::runtime_error("toml: missing value");
    if (s[i] == '"') {
        std::string out;
        ++i;
        while (i < s.size() && s[i] != '"') {
            if (s[i] == '\\' && i + 1 < s.size()) {
                ++i;
                switch (s[i]) {
                    case 'n': out.push_back('\n'); break;
                    case 't': out.push_back('\t'); break;
                    case '"': out.push_back('"'); break;
                    case '\\': out.push_back('\\'); break;
                    default: throw std::runtime_error("toml: bad escape");
                }
            } else {
                out.push_back(s[i]);
            }
            ++i;
        }
        if (i >= s.size()) throw std::runtime_error("toml: unterminated string");
        ++i;
        JVal v;
        v.kind = JVal::Kind::Str;
        v.str = std::move(out);
        return v;
    }
    if (s[i] == '[') {
        JVal v;
        v.kind = JVal::Kind::Arr;
        ++i;
        toml_skip_ws(s, i);
        if (i < s.size() && s[i] == ']') {
            ++i;
            return v;
        }
        while (true) {
            v.arr.push_back(toml_value(s, i));
            toml_skip_ws(s, i);
            if (i < s.size() && s[i] == ',') {
                ++i;
                continue;
            }
            if (i < s.size() && s[i] == ']') {
                ++i;
                return v;
            }
            throw std::runtime_error("toml: expected ',' or ']' in array");
        }
    }
    if (s[i] == '{') {
        JVal v;
        v.kind = JVal::Kind::Obj;
        ++i;
        toml_skip_ws(s, i);
        if (i < s.size() && s[i] == '}') {
            ++i;
            return v;
        }
        while (true) {
            toml_skip_ws(s, i);
            std::size_t start = i;
            while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) ||
                                    s[i] == '_' || s[i] == '-'))
                ++i;
            if (start == i) throw std::runtime_error("toml: expected key in inline table");
            std::string key(s.substr(start, i - start));
            toml_skip_ws(s, i);
            if (i >= s.size() || s[i] != '=')
                throw std::runtime_error("toml: expected '=' in inline table");
            ++i;
            v.obj.emplace_back(std::move(key), toml_value(s, i));
            toml_skip_ws(s, i);
            if (i < s.size() && s[i] == ',') {
                ++i;
                continue;
            }
            if (i < s.size() && s[i] == '}') {
                ++i;
                return v;
            }
            throw std::runtime_error("toml: expected ',' or '}' in inline table");
        }
    }
    // bare scalar: read to delimiter
    std::size_t start = i;
    while (i < s.size() && s[i] != ',' && s[i] != ']' && s[i] != '}' && s[i] != '#') ++i;
    std::string_view raw = s.substr(start, i - start);
    while (!raw.empty() && (raw.back() == ' ' || raw.back() == '\t')) raw.remove_suffix(1);
    return toml_scalar(raw);
}

inline JVal toml_scalar(std::string_view raw) {
    JVal v;
    if (raw == "true" || raw == "false") {
        v.kind = JVal::Kind::Bool;
        v.boolean = raw == "true";
        return v;
    }
    if (raw.size() == 10 && raw[4] == '-' && raw[7] == '-' && parse_iso_date(raw)) {
        v.kind = JVal::Kind::Str;
        v.str = std::string(raw);
        return v;
    }
    bool numeric = !raw.empty();
    for (char c : raw)
        if (!std::isdigit(static_cast<unsigned char>(c)) && c != '.' && c != '-' && c != '+' &&
            c != 'e' && c != 'E' && c != '_')
            numeric = false;
    if (numeric) {
        v.kind = JVal::Kind::Num;
        for (char c : raw)
            if (c != '_') v.num.push_back(c);
        return v;
    }
    // bare word (duration strings like 7d) kept as string
    v.kind = JVal::Kind::Str;
    v.str = std::string(raw);
    return v;
}

inline std::vector<std::string> toml_path(std::string_view s) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : s) {
        if (c == '.') {
            parts.push_back(cur);
            cur.clear();
        } else if (!std::isspace(static_cast<unsigned char>(c))) {
            cur.push_back(c);
        }
    }
    parts.push_back(cur);
    return parts;
}

inline JVal* toml_descend(JVal& root, const std::vector<std::string>& path, bool array_table) {
    JVal* node = &root;
    for (std::size_t d = 0; d < path.size(); ++d) {
        const std::string& key = path[d];
        JVal* child = nullptr;
        for (auto& [k, v] : node->obj)
            if (k == key) child = &v;
        if (!child) {
            node->obj.emplace_back(key, JVal{});
            child = &node->obj.back().second;
            child->kind = (d + 1 == path.size() && array_table) ? JVal::Kind::Arr
                                                                : JVal::Kind::Obj;
        }
        if (d + 1 == path.size() && array_table) {
            if (child->kind != JVal::Kind::Arr)
                throw std::runtime_error("toml: [[" + key + "]] conflicts with earlier table");
            child->arr.emplace_back();
            child->arr.back().kind = JVal::Kind::Obj;
            return &child->arr.back();
        }
        if (child->kind == JVal::Kind::Arr) {
            if (child->arr.empty()) throw std::runtime_error("toml: bad array table path");
            node = &child->arr.back();
        } else {
            node = child;
        }
    }
    return node;
}

}  // namespace detail

inline JVal parse_toml(std::string_view text) {
    JVal root;
    root.kind = JVal::Kind::Obj;
    JVal* current = &root;
    std::size_t pos = 0;
    int line_no = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        std::size_t i = 0;
        detail::toml_skip_ws(line, i);
        if (i >= line.size() || line[i] == '#' || line[i] == '\r') {
            if (pos > text.size()) break;
            continue;
        }
        try {
            if (line[i] == '[') {
                const bool array_table = i + 1 < line.size() && line[i + 1] == '[';
                const std::size_t open = i + (array_table ? 2 : 1);
                const std::size_t close = line.find(array_table ? "]]" : "]", open);
                if (close == std::string_view::npos)
                    throw std::runtime_error("toml: unterminated table header");
                current = detail::toml_descend(
                    root, detail::toml_path(line.substr(open, close - open)), array_table);
            } else {
                std::size_t start = i;
                while (i < line.size() && line[i] != '=' && line[i] != ' ' && line[i] != '\t')
                    ++i;
                std::string key(line.substr(start, i - start));
                detail::toml_skip_ws(line, i);
                if (i >= line.size() || line[i] != '=')
                    throw std::runtime_error("toml: expected '='");
                ++i;
                JVal value = detail::toml_value(line, i);
                detail::toml_skip_ws(line, i);
                if (i < line.size() && line[i] != '#' && line[i] != '\r')
                    throw std::runtime_error("toml: trailing characters");
                if (key.empty()) throw std::runtime_error("toml: empty key");
                current->obj.emplace_back(std::move(key), std::move(value));
            }
        } catch (const std::exception& ex) {
            throw std::runtime_error(std::string(ex.what()) + " at line " +
                                     std::to_string(line_no));
        }
        if (pos > text.size()) break;
    }
    return root;
}

/// Loads .toml or .json by extension into the same tree shape.
inline JVal parse_config_text(const std::string& path, std::string_view text) {
    if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") return parse_json(text);
    return parse_toml(text);
}

// --------------------------------------------------------- pipeline config

struct PipelineConfig {
    // input
    std::string input_path;
    std::string input_format;  // "csv" or "json"; inferred from extension if empty
    // align
    std::int64_t tau = 7 * 86400;
    std::int64_t delta = 12 * 3600;
    std::optional<std::int64_t> t0;
    std::optional<std::int64_t> t_end;
    // map
    std::string metadata_path;
    std::string manual_path;
    std::string texts_path;
    double theta_sim = 0.3;
    // build
    Decimal theta_node;
    NewTokenPolicy new_token_policy = NewTokenPolicy::Include;
    // metrics
    bool curvature = true;
    double ricci_alpha = 0.0;
    int top_compositions = 10;
    // sectors
    std::string sector_map_path;
    std::string categories_path;
    FlowOrientation orientation = FlowOrientation::Inbound;
    bool include_intra = false;
    std::optional<std::string> event_date;
    int window = 4;
    int var_lags = 2;
    int var_horizon = 12;
    std::vector<std::string> incident_sectors = {"Asset Management", "Trading & Exchanges"};
    // cluster
    bool cluster_enabled = false;
    double perplexity = 30.0;
    double eps_start = 0.1, eps_stop = 5.0, eps_step = 0.1;
    int min_samples_start = 3, min_samples_stop = 30;
    // predict
    int epochs_per_snapshot = 50;
    double learning_rate = 0.01;
    double early_stop_tol = 1e-4;
    bool use_adam = false;
    // run
    std::string out_dir = "out";
    std::uint64_t seed = 42;
    unsigned workers = 1;
};

namespace detail {

inline std::int64_t duration_field(const JVal& v, const char* what) {
    auto d = v.is_str() ? parse_duration(v.as_str()) : std::optional<std::int64_t>(v.as_i64());
    if (!d || *d <= 0) throw std::runtime_error(std::string("config: bad duration for ") + what);
    return *d;
}

inline std::int64_t date_field(const JVal& v, const char* what) {
    auto d = v.is_str() ? parse_iso_date(v.as_str()) : std::optional<std::int64_t>(v.as_i64());
    if (!d) throw std::runtime_error(std::string("config: bad date for ") + what);
    return *d;
}

}  // namespace detail

/// Strict parse: unknown sections or keys are errors, thresholds are range
/// checked.
inline PipelineConfig parse_pipeline_config(const JVal& root) {
    PipelineConfig cfg;
    if (!root.is_obj()) throw std::runtime_error("config: root must be a table");
    for (const auto& [section, body] : root.obj) {
        auto unknown = [&](const std::string& key) {
            throw std::runtime_error("config: unknown key '" + section + "." + key + "'");
        };
        if (section == "input") {
            for (const auto& [k, v] : body.obj) {
                if (k == "path") cfg.input_path = v.as_str();
                else if (k == "format") cfg.input_format = v.as_str();
                else unknown(k);
            }
        } else if (section == "align") {
            for (const auto& [k, v] : body.obj) {
                if (k == "tau") cfg.tau = detail::duration_field(v, "align.tau");
                else if (k == "delta") {
                    auto d = v.is_str() ? parse_duration(v.as_str())
                                        : std::optional<std::int64_t>(v.as_i64());
                    if (!d || *d < 0) throw std::runtime_error("config: bad align.delta");
                    cfg.delta = *d;
                } else if (k == "t0") cfg.t0 = detail::date_field(v, "align.t0");
                else if (k == "t_end") cfg.t_end = detail::date_field(v, "align.t_end");
                else unknown(k);
            }
        } else if (section == "map") {
            for (const auto& [k, v] : body.obj) {
                if (k == "metadata") cfg.metadata_path = v.as_str();
                else if (k == "manual") cfg.manual_path = v.as_str();
                else if (k == "texts") cfg.texts_path = v.as_str();
                else if (k == "theta_sim") cfg.theta_sim = v.as_double();
                else unknown(k);
            }
        } else if (section == "build") {
            for (const auto& [k, v] : body.obj) {
                if (k == "theta_node") {
                    auto d = v.is_num() ? Decimal::parse(v.num)
                                        : Decimal::parse(v.as_str());
                    if (!d || d->negative())
                        throw std::runtime_error("config: bad build.theta_node");
                    cfg.theta_node = *d;
                } else if (k == "new_token_policy") {
                    auto p = parse_new_token_policy(v.as_str());
                    if (!p) throw std::runtime_error("config: bad build.new_token_policy");
                    cfg.new_token_policy = *p;
                } else unknown(k);
            }
        } else if (section == "metrics") {
            for (const auto& [k, v] : body.obj) {
                if (k == "curvature") cfg.curvature = v.as_bool();
                else if (k == "alpha") cfg.ricci_alpha = v.as_double();
                else if (k == "top_compositions")
                    cfg.top_compositions = static_cast<int>(v.as_i64());
                else unknown(k);
            }
        } else if (section == "sectors") {
            for (const auto& [k, v] : body.obj) {
                if (k == "sector_map") cfg.sector_map_path = v.as_str();
                else if (k == "categories") cfg.categories_path = v.as_str();
                else if (k == "orientation") {
                    auto o = parse_orientation(v.as_str());
                    if (!o) throw std::runtime_error("config: bad sectors.orientation");
                    cfg.orientation = *o;
                } else if (k == "include_intra") cfg.include_intra = v.as_bool();
                else if (k == "event") cfg.event_date = v.as_str();
                else if (k == "window") cfg.window = static_cast<int>(v.as_i64());
                else if (k == "var_lags") cfg.var_lags = static_cast<int>(v.as_i64());
                else if (k == "var_horizon") cfg.var_horizon = static_cast<int>(v.as_i64());
                else if (k == "incident_sectors") {
                    cfg.incident_sectors.clear();
                    for (const auto& e : v.arr) cfg.incident_sectors.push_back(e.as_str());
                } else unknown(k);
            }
        } else if (section == "cluster") {
            for (const auto& [k, v] : body.obj) {
                if (k == "enabled") cfg.cluster_enabled = v.as_bool();
                else if (k == "perplexity") cfg.perplexity = v.as_double();
                else if (k == "eps_start") cfg.eps_start = v.as_double();
                else if (k == "eps_stop") cfg.eps_stop = v.as_double();
                else if (k == "eps_step") cfg.eps_step = v.as_double();
                else if (k == "min_samples_start")
                    cfg.min_samples_start = static_cast<int>(v.as_i64());
                else if (k == "min_samples_stop")
                    cfg.min_samples_stop = static_cast<int>(v.as_i64());
                else unknown(k);
            }
        } else if (section == "predict") {
            for (const auto& [k, v] : body.obj) {
                if (k == "epochs_per_snapshot")
                    cfg.epochs_per_snapshot = static_cast<int>(v.as_i64());
                else if (k == "learning_rate") cfg.learning_rate = v.as_double();
                else if (k == "early_stop_tol") cfg.early_stop_tol = v.as_double();
                else if (k == "optimizer") {
                    const std::string o = v.as_str();
                    if (o == "gd") cfg.use_adam = false;
                    else if (o == "adam") cfg.use_adam = true;
                    else throw std::runtime_error("config: bad predict.optimizer");
                } else unknown(k);
            }
        } else if (section == "run") {
            for (const auto& [k, v] : body.obj) {
                if (k == "out_dir") cfg.out_dir = v.as_str();
                else if (k == "seed") cfg.seed = static_cast<std::uint64_t>(v.as_i64());
                else if (k == "workers") cfg.workers = static_cast<unsigned>(v.as_i64());
                else unknown(k);
            }
        } else {
            throw std::runtime_error("config: unknown section '" + section + "'");
        }
    }
    if (!(cfg.theta_sim > 0.0 && cfg.theta_sim < 1.0))
        throw std::runtime_error("config: map.theta_sim must be in (0,1)");
    if (cfg.delta < 0 || 2 * cfg.delta >= cfg.tau)
        throw std::runtime_error("config: align.delta must satisfy 0 <= delta < tau/2");
    if (cfg.ricci_alpha < 0.0 || cfg.ricci_alpha >= 1.0)
        throw std::runtime_error("config: metrics.alpha must be in [0,1)");
    if (cfg.window < 0) throw std::runtime_error("config: sectors.window must be >= 0");
    if (cfg.var_lags < 1) throw std::runtime_error("config: sectors.var_lags must be >= 1");
    if (cfg.var_horizon < 1) throw std::runtime_error("config: sectors.var_horizon must be >= 1");
    if (cfg.perplexity <= 1.0) throw std::runtime_error("config: cluster.perplexity must exceed 1");
    if (cfg.epochs_per_snapshot < 1)
        throw std::runtime_error("config: predict.epochs_per_snapshot must be >= 1");
    if (cfg.learning_rate < 0) throw std::runtime_error("config: predict.learning_rate < 0");
    if (cfg.early_stop_tol < 0) throw std::runtime_error("config: predict.early_stop_tol < 0");
    if (cfg.workers < 1) cfg.workers = 1;
    return cfg;
}

}  // namespace tvlnet
