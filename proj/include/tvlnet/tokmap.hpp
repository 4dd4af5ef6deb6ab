#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tvlnet/csv.hpp"
#include "tvlnet/jval.hpp"
#include "tvlnet/util.hpp"

namespace tvlnet {

/// Which fallback stage produced a token's issuing protocol.
enum class MapStage { Metadata, Manual, Tfidf, PrimaryMarket };

inline const char* to_string(MapStage s) {
    switch (s) {
        case MapStage::Metadata: return "metadata";
        case MapStage::Manual: return "manual";
        case MapStage::Tfidf: return "tfidf";
        case MapStage::PrimaryMarket: return "primary_market";
    }
    return "unknown";
}

inline std::optional<MapStage> parse_map_stage(std::string_view s) {
    if (s == "metadata") return MapStage::Metadata;
    if (s == "manual") return MapStage::Manual;
    if (s == "tfidf") return MapStage::Tfidf;
    if (s == "primary_market") return MapStage::PrimaryMarket;
    return std::nullopt;
}

struct MapEntry {
    std::string protocol_id;
    MapStage stage = MapStage::PrimaryMarket;
    std::optional<double> score;  // present iff stage == Tfidf
};

struct TokenProtocolMap {
    std::map<std::string, MapEntry> entries;

    const MapEntry* find(const std::string& token) const {
        auto it = entries.find(token);
        return it == entries.end() ? nullptr : &it->second;
    }
};

// --------------------------------------------------------------- tf-idf

/// Sparse vector sorted by term index.
using SparseVec = std::vector<std::pair<int, double>>;

inline double sparse_dot(const SparseVec& a, const SparseVec& b) {
    double dot = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i].first == b[j].first) {
            dot += a[i].second * b[j].second;
            ++i;
            ++j;
        } else if (a[i].first < b[j].first) {
            ++i;
        } else {
            ++j;
        }
    }
    return dot;
}

inline double sparse_norm(const SparseVec& a) {
    double s = 0.0;
    for (const auto& [_, v] : a) s += v * v;
    return std::sqrt(s);
}

/// Zero when either vector has zero norm.
inline double cosine_similarity(const SparseVec& a, const SparseVec& b) {
    const double na = sparse_norm(a), nb = sparse_norm(b);
    if (na == 0.0 || nb == 0.0) return 0.0;
    return sparse_dot(a, b) / (na * nb);
}

/// Descriptive texts for tokens and protocols plus the fitted vocabulary.
/// idf is computed over the union of token docs and protocol docs:
/// idf(t) = ln(N / df(t)) with raw term counts as tf.
struct TextCorpus {
    std::map<std::string, std::string> token_docs;
    std::map<std::string, std::string> protocol_docs;

    std::map<std::string, int> vocab;       // term -> index
    std::vector<double> idf;                // by index
    std::map<std::string, SparseVec> token_vecs;
    std::map<std::string, SparseVec> protocol_vecs;

    std::size_t doc_count() const { return token_docs.size() + protocol_docs.size(); }
};

namespace detail {

inline SparseVec vectorize(const std::map<std::string, int>& vocab,
                           const std::vector<double>& idf, const std::string& text) {
    std::map<int, int> counts;
    for (const auto& term : tokenize_text(text)) {
        auto it = vocab.find(term);
        if (it != vocab.end()) ++counts[it->second];
    }
    SparseVec v;
    v.reserve(counts.size());
    for (const auto& [idx, tf] : counts) {
        const double w = tf * idf[static_cast<std::size_t>(idx)];
        if (w != 0.0) v.emplace_back(idx, w);
    }
    return v;
}

}  // namespace detail

inline TextCorpus build_corpus(std::map<std::string, std::string> token_docs,
                               std::map<std::string, std::string> protocol_docs) {
    TextCorpus c;
    c.token_docs = std::move(token_docs);
    c.protocol_docs = std::move(protocol_docs);

    // document frequencies over the union
    std::map<std::string, int> df;
    auto count_doc = [&](const std::string& text) {
        std::map<std::string, bool> seen;
        for (const auto& term : tokenize_text(text)) {
            if (!seen[term]) {
                seen[term] = true;
                ++df[term];
            }
        }
    };
    for (const auto& [_, text] : c.token_docs) count_doc(text);
    for (const auto& [_, text] : c.protocol_docs) count_doc(text);

    int next = 0;
    for (const auto& [term, _] : df) c.vocab[term] = next++;
    c.idf.resize(static_cast<std::size_t>(next));
    const double n_docs = static_cast<double>(c.doc_count());
    for (const auto& [term, d] : df)
        c.idf[static_cast<std::size_t>(c.vocab[term])] = std::log(n_docs / d);

    for (const auto& [id, text] : c.token_docs)
        c.token_vecs[id] = detail::vectorize(c.vocab, c.idf, text);
    for (const auto& [id, text] : c.protocol_docs)
        c.protocol_vecs[id] = detail::vectorize(c.vocab, c.idf, text);
    return c;
}

/// tf-idf vectors for every entity in the corpus (tokens and protocols).
inline std::map<std::string, SparseVec> tfidf_vectors(const TextCorpus& c) {
    std::map<std::string, SparseVec> all = c.token_vecs;
    for (const auto& [id, v] : c.protocol_vecs) all[id] = v;
    return all;
}

// ------------------------------------------------------------- resolution

/// Resolves one token to its issuing protocol through the four fallback
/// stages, in strict order:
///   1. metadata listing, 2. manual table, 3. best tf-idf cosine above
///   theta_sim (ties to the lexicographically smallest protocol), and
///   4. a primary-market pseudo-protocol named after the token itself.
/// Stage 4 is total, so every token resolves to exactly one entry.
inline MapEntry resolve(const std::string& token,
                        const std::map<std::string, std::string>& metadata_map,
                        const std::map<std::string, std::string>& manual_map,
                        const TextCorpus& corpus, double theta_sim) {
    if (auto it = metadata_map.find(token); it != metadata_map.end())
        return MapEntry{it->second, MapStage::Metadata, std::nullopt};
    if (auto it = manual_map.find(token); it != manual_map.end())
        return MapEntry{it->second, MapStage::Manual, std::nullopt};

    if (auto it = corpus.token_vecs.find(token); it != corpus.token_vecs.end()) {
        const SparseVec& tv = it->second;
        double best = 0.0;
        const std::string* best_protocol = nullptr;
        for (const auto& [pid, pv] : corpus.protocol_vecs) {
            const double s = cosine_similarity(tv, pv);
            if (!best_protocol || s > best) {  // map order breaks ties lexicographically
                best = s;
                best_protocol = &pid;
            }
        }
        if (best_protocol && best > theta_sim)
            return MapEntry{*best_protocol, MapStage::Tfidf, best};
    }
    return MapEntry{token, MapStage::PrimaryMarket, std::nullopt};
}

inline TokenProtocolMap resolve_all(const std::vector<std::string>& tokens,
                                    const std::map<std::string, std::string>& metadata_map,
                                    const std::map<std::string, std::string>& manual_map,
                                    const TextCorpus& corpus, double theta_sim) {
    if (!(theta_sim > 0.0 && theta_sim < 1.0))
        throw std::invalid_argument("resolve_all: theta_sim must be in (0,1)");
    TokenProtocolMap m;
    for (const auto& t : tokens)
        m.entries[t] = resolve(t, metadata_map, manual_map, corpus, theta_sim);
    return m;
}

// -------------------------------------------------------------- file io

/// Manual map CSV: token_id,protocol_id with a header row.
inline std::map<std::string, std::string> read_manual_map_csv(std::string_view text) {
    std::map<std::string, std::string> m;
    auto rows = parse_csv(text);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (i == 0 && !rows[i].empty() && rows[i][0] == "token_id") continue;
        if (rows[i].size() != 2)
            throw std::runtime_error("manual map: expected 2 columns at row " +
                                     std::to_string(i + 1));
        m[rows[i][0]] = rows[i][1];
    }
    return m;
}

/// Metadata map JSON: {"token_id": "protocol_id", ...}
inline std::map<std::string, std::string> read_metadata_map_json(std::string_view text) {
    std::map<std::string, std::string> m;
    JVal root = parse_json(text);
    if (!root.is_obj()) throw std::runtime_error("metadata map must be a JSON object");
    for (const auto& [k, v] : root.obj) m[k] = v.as_str();
    return m;
}

/// Texts JSON: {"tokens": {id: text}, "protocols": {id: text}}
inline std::pair<std::map<std::string, std::string>, std::map<std::string, std::string>>
read_texts_json(std::string_view text) {
    JVal root = parse_json(text);
    std::map<std::string, std::string> tok, prot;
    if (const JVal* t = root.find("tokens"))
        for (const auto& [k, v] : t->obj) tok[k] = v.as_str();
    if (const JVal* p = root.find("protocols"))
        for (const auto& [k, v] : p->obj) prot[k] = v.as_str();
    return {tok, prot};
}

inline std::string write_texts_json(const std::map<std::string, std::string>& tokens,
                                    const std::map<std::string, std::string>& protocols) {
    std::string out = "{\n  \"tokens\": {\n";
    std::size_t i = 0;
    for (const auto& [k, v] : tokens) {
        out += "    " + json_quote(k) + ": " + json_quote(v);
        out += ++i < tokens.size() ? ",\n" : "\n";
    }
    out += "  },\n  \"protocols\": {\n";
    i = 0;
    for (const auto& [k, v] : protocols) {
        out += "    " + json_quote(k) + ": " + json_quote(v);
        out += ++i < protocols.size() ? ",\n" : "\n";
    }
    out += "  }\n}\n";
    return out;
}

inline std::string write_token_map_json(const TokenProtocolMap& m) {
    std::string out = "{\n";
    std::size_t i = 0;
    for (const auto& [token, e] : m.entries) {
        out += "  " + json_quote(token) + ": {\"protocol_id\": " + json_quote(e.protocol_id) +
               ", \"stage\": " + json_quote(to_string(e.stage));
        if (e.score) {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.17g", *e.score);
            out += ", \"score\": ";
            out += buf;
        }
        out += ++i < m.entries.size() ? "},\n" : "}\n";
    }
    out += "}\n";
    return out;
}

inline TokenProtocolMap read_token_map_json(std::string_view text) {
    TokenProtocolMap m;
    JVal root = parse_json(text);
    if (!root.is_obj()) throw std::runtime_error("token map must be a JSON object");
    for (const auto& [token, v] : root.obj) {
        MapEntry e;
        e.protocol_id = v.at("protocol_id").as_str();
        auto stage = parse_map_stage(v.at("stage").as_str());
        if (!stage) throw std::runtime_error("token map: bad stage for " + token);
        e.stage = *stage;
        if (const JVal* s = v.find("score")) e.score = s->as_double();
        m.entries[token] = std::move(e);
    }
    return m;
}

}  // namespace tvlnet
