#pragma once

#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "tvlnet/config.hpp"
#include "tvlnet/dbscan.hpp"
#include "tvlnet/features.hpp"
#include "tvlnet/metrics.hpp"
#include "tvlnet/netbuild.hpp"
#include "tvlnet/sectors.hpp"
#include "tvlnet/tgnn.hpp"
#include "tvlnet/tsne.hpp"
#include "tvlnet/var.hpp"

namespace tvlnet {

struct StageArtifact {
    std::string path;  // relative to out_dir
    std::string hash;  // fnv1a64 of the file bytes, hex
};

struct StageEntry {
    std::string name;
    std::string params;
    std::vector<StageArtifact> artifacts;
};

struct Manifest {
    std::string config_hash;
    std::vector<StageEntry> stages;

    std::string to_json() const {
        std::string out = "{\n  \"config_hash\": " + json_quote(config_hash) +
                          ",\n  \"stages\": [\n";
        for (std::size_t i = 0; i < stages.size(); ++i) {
            const auto& s = stages[i];
            out += "    {\"name\": " + json_quote(s.name) + ", \"params\": " +
                   json_quote(s.params) + ", \"artifacts\": [";
            for (std::size_t j = 0; j < s.artifacts.size(); ++j) {
                if (j) out += ", ";
                out += "{\"path\": " + json_quote(s.artifacts[j].path) + ", \"fnv1a64\": " +
                       json_quote(s.artifacts[j].hash) + "}";
            }
            out += i + 1 < stages.size() ? "]},\n" : "]}\n";
        }
        out += "  ]\n}\n";
        return out;
    }
};

namespace detail {

/// Writes under out_dir and records the artifact hash.
class StageWriter {
public:
    StageWriter(const std::filesystem::path& out_dir, StageEntry& entry)
        : out_dir_(out_dir), entry_(entry) {}

    void write(const std::string& rel_path, std::string_view content) {
        const std::filesystem::path full = out_dir_ / rel_path;
        std::filesystem::create_directories(full.parent_path());
        write_file(full.string(), content);
        entry_.artifacts.push_back({rel_path, hex64(fnv1a64(content))});
    }

private:
    std::filesystem::path out_dir_;
    StageEntry& entry_;
};

inline std::string infer_record_format(const PipelineConfig& cfg) {
    if (!cfg.input_format.empty()) return cfg.input_format;
    const auto& p = cfg.input_path;
    if (p.size() >= 5 && p.substr(p.size() - 5) == ".json") return "json";
    return "csv";
}

}  // namespace detail

inline std::vector<NetworkSnapshot> read_snapshot_dir(const std::string& dir) {
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    std::vector<NetworkSnapshot> out;
    out.reserve(files.size());
    for (const auto& f : files) out.push_back(read_snapshot_json(read_file(f.string())));
    std::sort(out.begin(), out.end(),
              [](const NetworkSnapshot& a, const NetworkSnapshot& b) { return a.date < b.date; });
    return out;
}

/// Runs the pipeline stages in dependency order: ingest, map, build,
/// metrics, sectors, predict (plus cluster when enabled). `only` restricts
/// to a single stage, reading that stage's inputs from out_dir. The
/// manifest is rewritten after every stage so a failed run keeps the
/// entries of the stages that completed.
inline Manifest run_pipeline(const PipelineConfig& cfg, const std::string& only = "",
                             std::ostream& log = std::cerr) {
    const std::filesystem::path out_dir(cfg.out_dir);
    std::filesystem::create_directories(out_dir);

    Manifest manifest;
    {
        std::string cfg_repr = cfg.input_path + "|" + std::to_string(cfg.tau) + "|" +
                               std::to_string(cfg.delta) + "|" + std::to_string(cfg.theta_sim) +
                               "|" + cfg.theta_node.str() + "|" + std::to_string(cfg.seed);
        manifest.config_hash = hex64(fnv1a64(cfg_repr));
    }
    auto flush_manifest = [&] {
        write_file((out_dir / "manifest.json").string(), manifest.to_json());
    };
    auto want = [&](const char* stage) { return only.empty() || only == stage; };
    flush_manifest();

    // state carried between stages (reloaded from disk when running --only)
    AlignedStateTable aligned;
    bool have_aligned = false;
    TokenProtocolMap tokmap;
    bool have_tokmap = false;
    std::vector<NetworkSnapshot> snapshots;
    bool have_snapshots = false;

    auto need_aligned = [&] {
        if (!have_aligned) {
            aligned = read_aligned_json(read_file((out_dir / "aligned.json").string()));
            have_aligned = true;
        }
    };
    auto need_tokmap = [&] {
        if (!have_tokmap) {
            tokmap = read_token_map_json(read_file((out_dir / "tokmap.json").string()));
            have_tokmap = true;
        }
    };
    auto need_snapshots = [&] {
        if (!have_snapshots) {
            snapshots = read_snapshot_dir((out_dir / "snapshots").string());
            have_snapshots = true;
        }
    };

    if (want("ingest")) {
        StageEntry entry{"ingest",
                         "tau=" + std::to_string(cfg.tau) + ",delta=" + std::to_string(cfg.delta),
                         {}};
        detail::StageWriter w(out_dir, entry);
        const std::string format = detail::infer_record_format(cfg);
        const std::string text = read_file(cfg.input_path);
        const ParsedRecords parsed =
            parse_records(text, format == "json" ? RecordFormat::Json : RecordFormat::Csv);
        log << "[ingest] " << parsed.records.size() << " records, "
            << parsed.rejections.size() << " rejected\n";
        aligned = align(parsed.records, cfg.tau, cfg.delta, cfg.t0, cfg.t_end);
        have_aligned = true;
        w.write("rejects.csv", rejections_csv(parsed.rejections));
        w.write("aligned.json", write_aligned_json(aligned));
        manifest.stages.push_back(std::move(entry));
        flush_manifest();
    }

    if (want("map")) {
        need_aligned();
        StageEntry entry{"map", "theta_sim=" + std::to_string(cfg.theta_sim), {}};
        detail::StageWriter w(out_dir, entry);
        std::map<std::string, std::string> metadata, manual;
        std::map<std::string, std::string> token_docs, protocol_docs;
        if (!cfg.metadata_path.empty())
            metadata = read_metadata_map_json(read_file(cfg.metadata_path));
        if (!cfg.manual_path.empty()) manual = read_manual_map_csv(read_file(cfg.manual_path));
        if (!cfg.texts_path.empty())
            std::tie(token_docs, protocol_docs) = read_texts_json(read_file(cfg.texts_path));
        std::set<std::string> token_set;
        for (const auto& [key, _] : aligned.series) token_set.insert(key.token_id);
        const TextCorpus corpus = build_corpus(token_docs, protocol_docs);
        tokmap = resolve_all(std::vector<std::string>(token_set.begin(), token_set.end()),
                             metadata, manual, corpus, cfg.theta_sim);
        have_tokmap = true;
        w.write("tokmap.json", write_token_map_json(tokmap));
        manifest.stages.push_back(std::move(entry));
        flush_manifest();
    }

    if (want("build")) {
        need_aligned();
        need_tokmap();
        StageEntry entry{"build",
                         "theta_node=" + cfg.theta_node.str() + ",policy=" +
                             (cfg.new_token_policy == NewTokenPolicy::Include ? "include"
                                                                              : "exclude"),
                         {}};
        detail::StageWriter w(out_dir, entry);
        if (aligned.steps < 2) throw std::runtime_error("build: need at least 2 grid points");
        snapshots = build_snapshot_series(aligned, tokmap, 0, aligned.steps - 1, cfg.theta_node,
                                          cfg.new_token_policy, cfg.workers);
        have_snapshots = true;
        for (const auto& s : snapshots)
            w.write("snapshots/snapshot_" + s.date + ".json", write_snapshot_json(s));
        log << "[build] " << snapshots.size() << " snapshots\n";
        manifest.stages.push_back(std::move(entry));
        flush_manifest();
    }

    if (want("metrics")) {
        need_snapshots();
        StageEntry entry{"metrics",
                         std::string("curvature=") + (cfg.curvature ? "on" : "off"),
                         {}};
        detail::StageWriter w(out_dir, entry);
        std::string csv = metrics_csv_header();
        std::string comp = "date,source,target,composition_length\n";
        std::vector<MetricsReport> reports(snapshots.size());
        parallel_for(snapshots.size(), cfg.workers, [&](std::size_t i) {
            reports[i] = compute_metrics(snapshots[i], cfg.curvature, cfg.ricci_alpha, 1);
        });
        for (std::size_t i = 0; i < snapshots.size(); ++i) {
            csv += metrics_csv_row(reports[i]);
            for (const auto& c :
                 composition_length(snapshots[i],
                                    static_cast<std::size_t>(cfg.top_compositions)))
                comp += csv_row({snapshots[i].date, c.source, c.target,
                                 std::to_string(c.length)});
        }
        w.write("metrics.csv", csv);
        w.write("compositions.csv", comp);
        manifest.stages.push_back(std::move(entry));
        flush_manifest();
    }

    if (want("sectors")) {
        need_snapshots();
        StageEntry entry{"sectors",
                         std::string("orientation=") +
                             (cfg.orientation == FlowOrientation::Inbound ? "in" : "out") +
                             ",lags=" + std::to_string(cfg.var_lags),
                         {}};
        detail::StageWriter w(out_dir, entry);
        SectorMap smap;
        if (!cfg.sector_map_path.empty() && !cfg.categories_path.empty())
            smap = load_sector_map(read_file(cfg.sector_map_path),
                                   read_file(cfg.categories_path));
        else if (!cfg.categories_path.empty())
            smap = default_sector_map([&] {
                std::map<std::string, std::string> cats;
                for (const auto& row : parse_csv(read_file(cfg.categories_path))) {
                    if (row.size() == 2 && row[0] != "protocol_id") cats[row[0]] = row[1];
                }
                return cats;
            }());
        else
            smap.category_to_sector = default_category_sectors();

        const auto flows = sector_flows(snapshots, smap, cfg.orientation, cfg.include_intra);
        w.write("sector_flows.csv", sector_flows_csv(flows));

        std::string matrix_csv = "date,from_sector,to_sector,size\n";
        for (const auto& snap : snapshots)
            for (const auto& [key, size] : sector_matrix(snap, smap))
                matrix_csv += csv_row({snap.date, key.first, key.second, size.str()});
        w.write("sector_matrix.csv", matrix_csv);

        if (cfg.event_date) {
            const auto rows =
                incident_table(snapshots, smap, cfg.incident_sectors, *cfg.event_date,
                               cfg.window);
            w.write("incident.csv", incident_csv(rows));
        }

        // VAR over per-sector expansion/contraction series; constant columns
        // cannot enter per-equation OLS and are dropped with a note
        std::map<std::string, std::size_t> sector_idx;
        std::vector<std::string> dates;
        for (const auto& p : flows) sector_idx.try_emplace(p.sector, sector_idx.size());
        for (const auto& s : snapshots) dates.push_back(s.date);
        Eigen::MatrixXd series =
            Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dates.size()),
                                  static_cast<Eigen::Index>(2 * sector_idx.size()));
        std::map<std::string, std::size_t> date_idx;
        for (std::size_t i = 0; i < dates.size(); ++i) date_idx[dates[i]] = i;
        for (const auto& p : flows) {
            const auto r = static_cast<Eigen::Index>(date_idx[p.date]);
            const auto c = static_cast<Eigen::Index>(2 * sector_idx[p.sector]);
            series(r, c) = p.expansion.to_double();
            series(r, c + 1) = p.contraction.to_double();
        }
        std::vector<std::string> names(2 * sector_idx.size());
        for (const auto& [sector, i] : sector_idx) {
            names[2 * i] = sector + ":expansion";
            names[2 * i + 1] = sector + ":contraction";
        }
        std::vector<Eigen::Index> keep;
        for (Eigen::Index c = 0; c < series.cols(); ++c) {
            const double mean = series.col(c).mean();
            if ((series.col(c).array() - mean).abs().maxCoeff() > 1e-9)
                keep.push_back(c);
            else
                log << "[sectors] dropping constant series " << names[static_cast<std::size_t>(c)]
                    << "\n";
        }
        if (!keep.empty() &&
            static_cast<int>(dates.size()) - cfg.var_lags >
                static_cast<int>(keep.size()) * cfg.var_lags + 1) {
            Eigen::MatrixXd kept(series.rows(), static_cast<Eigen::Index>(keep.size()));
            std::vector<std::string> kept_names;
            for (std::size_t i = 0; i < keep.size(); ++i) {
                kept.col(static_cast<Eigen::Index>(i)) = series.col(keep[i]);
                kept_names.push_back(names[static_cast<std::size_t>(keep[i])]);
            }
            const VarModel model = fit_var(kept, kept_names, cfg.var_lags);
            if (!model.stable)
                log << "[sectors] warning: VAR companion spectral radius "
                    << model.spectral_radius << " >= 1\n";
            w.write("irf.csv", irf_csv(model, irf(model, cfg.var_horizon)));
        } else {
            log << "[sectors] series too short for VAR(" << cfg.var_lags << "), skipping IRF\n";
        }
        manifest.stages.push_back(std::move(entry));
        flush_manifest();
    }

    if (cfg.cluster_enabled && want("cluster")) {
        need_snapshots();
        StageEntry entry{"cluster", "perplexity=" + std::to_string(cfg.perplexity), {}};
        detail::StageWriter w(out_dir, entry);
        const NetworkSnapshot& snap = snapshots.back();
        const NodeFeatures feats = node_features(snap);
        TsneOptions topt;
        topt.perplexity = cfg.perplexity;
        const TsneResult embedded = tsne(feats.standardized, derive_seed(cfg.seed, "cluster"),
                                         topt);
        SweepOptions sopt;
        sopt.eps_start = cfg.eps_start;
        sopt.eps_stop = cfg.eps_stop;
        sopt.eps_step = cfg.eps_step;
        sopt.min_samples_start = cfg.min_samples_start;
        sopt.min_samples_stop = cfg.min_samples_stop;
        sopt.workers = cfg.workers;
        auto [best, cells] = dbscan_sweep(embedded.embedding, sopt);
        std::string out = "{\n  \"date\": " + json_quote(snap.date) + ",\n";
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.12g", best.eps);
        out += "  \"eps\": " + std::string(buf) + ",\n";
        out += "  \"min_samples\": " + std::to_string(best.min_samples) + ",\n";
        out += "  \"n_clusters\": " + std::to_string(best.n_clusters) + ",\n";
        if (best.silhouette) {
            std::snprintf(buf, sizeof(buf), "%.12g", *best.silhouette);
            out += "  \"silhouette\": " + std::string(buf) + ",\n";
        }
        out += std::string("  \"target_missed\": ") + (best.target_missed ? "true" : "false") +
               ",\n  \"nodes\": [\n";
        for (std::size_t i = 0; i < feats.ids.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.12g, %.12g",
                          best.embedding(static_cast<Eigen::Index>(i), 0),
                          best.embedding(static_cast<Eigen::Index>(i), 1));
            out += "    {\"id\": " + json_quote(feats.ids[i]) + ", \"xy\": [" + buf +
                   "], \"label\": " + std::to_string(best.labels[i]) + "}";
            out += i + 1 < feats.ids.size() ? ",\n" : "\n";
        }
        out += "  ]\n}\n";
        w.write("clusters.json", out);
        std::string sweep_csv = "eps,min_samples,n_clusters,silhouette\n";
        for (const auto& c : cells) {
            std::string sil;
            if (c.silhouette) {
                std::snprintf(buf, sizeof(buf), "%.12g", *c.silhouette);
                sil = buf;
            }
            std::snprintf(buf, sizeof(buf), "%.12g", c.eps);
            sweep_csv += csv_row({buf, std::to_string(c.min_samples),
                                  std::to_string(c.n_clusters), sil});
        }
        w.write("sweep.csv", sweep_csv);
        manifest.stages.push_back(std::move(entry));
        flush_manifest();
    }

    if (want("predict")) {
        need_snapshots();
        StageEntry entry{"predict",
                         "epochs=" + std::to_string(cfg.epochs_per_snapshot) +
                             ",lr=" + std::to_string(cfg.learning_rate),
                         {}};
        detail::StageWriter w(out_dir, entry);
        if (snapshots.size() < 2) throw std::runtime_error("predict: need >= 2 snapshots");
        TgnnModel model = TgnnModel::make(derive_seed(cfg.seed, "tgnn"));
        NodeStateBank bank;
        TgnnConfig tcfg;
        tcfg.epochs_per_snapshot = cfg.epochs_per_snapshot;
        tcfg.learning_rate = cfg.learning_rate;
        tcfg.early_stop_tol = cfg.early_stop_tol;
        tcfg.use_adam = cfg.use_adam;
        tcfg.seed = derive_seed(cfg.seed, "tgnn-train");
        const auto rows = train_live(model, bank, snapshots, tcfg);
        w.write("eval.csv", eval_report_csv(rows));
        w.write("tgnn_model.json", write_model_json(model));
        manifest.stages.push_back(std::move(entry));
        flush_manifest();
    }

    return manifest;
}

}  // namespace tvlnet
