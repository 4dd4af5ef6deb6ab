// Command-line front end for the TVL network pipeline. Subcommands mirror
// the pipeline stages; `run` drives the whole thing from one config file.

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>

#include "tvlnet/tvlnet.hpp"

namespace fs = std::filesystem;
using namespace tvlnet;

namespace {

std::string slurp(const std::string& path) { return read_file(path); }

PipelineConfig load_pipeline_config(const std::string& path) {
    return parse_pipeline_config(parse_config_text(path, slurp(path)));
}

RecordFormat format_from(const std::string& fmt, const std::string& path) {
    if (fmt == "csv") return RecordFormat::Csv;
    if (fmt == "json") return RecordFormat::Json;
    if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") return RecordFormat::Json;
    return RecordFormat::Csv;
}

std::vector<NetworkSnapshot> load_snapshots(const std::string& dir) {
    auto snaps = read_snapshot_dir(dir);
    if (snaps.empty()) throw std::runtime_error("no snapshots in " + dir);
    return snaps;
}

SectorMap load_sectors(const std::string& sector_map_path, const std::string& categories_path) {
    if (!sector_map_path.empty() && !categories_path.empty())
        return load_sector_map(slurp(sector_map_path), slurp(categories_path));
    SectorMap m;
    m.category_to_sector = default_category_sectors();
    if (!categories_path.empty())
        for (const auto& row : parse_csv(slurp(categories_path)))
            if (row.size() == 2 && row[0] != "protocol_id") m.protocol_to_category[row[0]] = row[1];
    return m;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"TVL credit-exposure network pipeline"};
    app.require_subcommand(1);

    try {
        // ---------------------------------------------------------- ingest
        auto* ingest = app.add_subcommand("ingest", "Parse and align raw TVL records");
        std::string in_path, in_fmt, out_path = "aligned.json", rejects_path;
        std::string tau_s = "7d", delta_s = "12h", from_s, to_s;
        ingest->add_option("--input", in_path, "raw records file")->required();
        ingest->add_option("--format", in_fmt, "csv|json (default: by extension)");
        ingest->add_option("--tau", tau_s, "grid interval (e.g. 7d)");
        ingest->add_option("--delta", delta_s, "match tolerance (e.g. 12h)");
        ingest->add_option("--from", from_s, "grid start date YYYY-MM-DD");
        ingest->add_option("--to", to_s, "grid end date YYYY-MM-DD");
        ingest->add_option("--out", out_path, "aligned table output");
        ingest->add_option("--rejects", rejects_path, "rejection report CSV");
        ingest->callback([&] {
            auto tau = parse_duration(tau_s);
            auto delta = parse_duration(delta_s);
            if (!tau || !delta) throw CLI::ValidationError("bad --tau/--delta");
            std::optional<std::int64_t> t0, t1;
            if (!from_s.empty()) t0 = parse_iso_date(from_s);
            if (!to_s.empty()) t1 = parse_iso_date(to_s);
            auto parsed = parse_records(slurp(in_path), format_from(in_fmt, in_path));
            std::cerr << parsed.records.size() << " records, " << parsed.rejections.size()
                      << " rejected\n";
            auto table = align(parsed.records, *tau, *delta, t0, t1);
            write_file(out_path, write_aligned_json(table));
            if (!rejects_path.empty()) write_file(rejects_path, rejections_csv(parsed.rejections));
        });

        // ----------------------------------------------------------- synth
        auto* synth = app.add_subcommand("synth", "Generate a synthetic TVL dataset");
        std::string synth_cfg_path, synth_out = "synthetic.csv", synth_dir;
        std::uint64_t synth_seed = 42;
        synth->add_option("--config", synth_cfg_path, "synth config (toml/json)")->required();
        synth->add_option("--seed", synth_seed, "rng seed");
        synth->add_option("--out", synth_out, "records CSV output");
        synth->add_option("--companions", synth_dir,
                          "directory for token_meta.json/categories.csv/texts.json");
        synth->callback([&] {
            auto cfg = parse_synth_config(parse_config_text(synth_cfg_path, slurp(synth_cfg_path)));
            auto records = synth_dataset(cfg, synth_seed);
            write_file(synth_out, serialize_records_csv(records));
            std::cerr << records.size() << " records written\n";
            if (!synth_dir.empty()) {
                fs::create_directories(synth_dir);
                std::string meta = "{\n";
                const auto m = synth_token_metadata(cfg);
                std::size_t i = 0;
                for (const auto& [k, v] : m) {
                    meta += "  " + json_quote(k) + ": " + json_quote(v);
                    meta += ++i < m.size() ? ",\n" : "\n";
                }
                meta += "}\n";
                write_file((fs::path(synth_dir) / "token_meta.json").string(), meta);
                std::string cats = "protocol_id,category\n";
                for (const auto& [p, c] : synth_protocol_categories(cfg))
                    cats += csv_row({p, c});
                write_file((fs::path(synth_dir) / "categories.csv").string(), cats);
                const auto texts = synth_texts(cfg);
                write_file((fs::path(synth_dir) / "texts.json").string(),
                           write_texts_json(texts.token_docs, texts.protocol_docs));
            }
        });

        // ------------------------------------------------------ map-tokens
        auto* mapt = app.add_subcommand("map-tokens", "Resolve tokens to issuing protocols");
        std::string aligned_path, meta_path, manual_path, texts_path, map_out = "tokmap.json";
        double theta_sim = 0.3;
        mapt->add_option("--aligned", aligned_path, "aligned table (token universe)")->required();
        mapt->add_option("--metadata", meta_path, "metadata map JSON");
        mapt->add_option("--manual", manual_path, "manual map CSV");
        mapt->add_option("--texts", texts_path, "texts JSON for tf-idf");
        mapt->add_option("--theta", theta_sim, "tf-idf similarity threshold");
        mapt->add_option("--out", map_out, "token map output");
        mapt->callback([&] {
            auto table = read_aligned_json(slurp(aligned_path));
            std::set<std::string> tokens;
            for (const auto& [k, _] : table.series) tokens.insert(k.token_id);
            std::map<std::string, std::string> metadata, manual, tok_docs, prot_docs;
            if (!meta_path.empty()) metadata = read_metadata_map_json(slurp(meta_path));
            if (!manual_path.empty()) manual = read_manual_map_csv(slurp(manual_path));
            if (!texts_path.empty()) std::tie(tok_docs, prot_docs) = read_texts_json(slurp(texts_path));
            auto corpus = build_corpus(tok_docs, prot_docs);
            auto result = resolve_all(std::vector<std::string>(tokens.begin(), tokens.end()),
                                      metadata, manual, corpus, theta_sim);
            write_file(map_out, write_token_map_json(result));
        });

        // ----------------------------------------------------------- build
        auto* build = app.add_subcommand("build", "Build snapshot series from aligned table");
        std::string b_aligned, b_map, b_out = "snapshots", b_theta = "0", b_policy = "include";
        std::string b_from, b_to;
        unsigned b_workers = 1;
        build->add_option("--input", b_aligned, "aligned table")->required();
        build->add_option("--map", b_map, "token map JSON")->required();
        build->add_option("--from", b_from, "first interval start date");
        build->add_option("--to", b_to, "last interval end date");
        build->add_option("--theta-node", b_theta, "node prune threshold (USD)");
        build->add_option("--new-token-policy", b_policy, "include|exclude");
        build->add_option("--out", b_out, "output directory");
        build->add_option("--workers", b_workers, "parallel intervals");
        build->callback([&] {
            auto table = read_aligned_json(slurp(b_aligned));
            auto tokmap = read_token_map_json(slurp(b_map));
            auto theta = Decimal::parse(b_theta);
            if (!theta) throw CLI::ValidationError("bad --theta-node");
            auto policy = parse_new_token_policy(b_policy);
            if (!policy) throw CLI::ValidationError("bad --new-token-policy");
            std::int64_t k_from = 0, k_to = table.steps - 1;
            if (!b_from.empty()) {
                auto d = parse_iso_date(b_from);
                if (!d) throw CLI::ValidationError("bad --from");
                k_from = (*d - table.t0) / table.tau;
            }
            if (!b_to.empty()) {
                auto d = parse_iso_date(b_to);
                if (!d) throw CLI::ValidationError("bad --to");
                k_to = (*d - table.t0) / table.tau;
            }
            auto snaps = build_snapshot_series(table, tokmap, k_from, k_to, *theta, *policy,
                                               b_workers);
            fs::create_directories(b_out);
            for (const auto& s : snaps)
                write_file((fs::path(b_out) / ("snapshot_" + s.date + ".json")).string(),
                           write_snapshot_json(s));
            std::cerr << snaps.size() << " snapshots written\n";
        });

        // --------------------------------------------------------- metrics
        auto* metrics = app.add_subcommand("metrics", "Global metrics per snapshot");
        std::string m_dir, m_out = "metrics.csv", m_comp;
        double m_alpha = 0.0;
        bool m_no_curv = false;
        int m_topk = 10;
        unsigned m_workers = 1;
        metrics->add_option("--snapshots", m_dir, "snapshot directory")->required();
        metrics->add_option("--out", m_out, "metrics CSV");
        metrics->add_option("--compositions", m_comp, "top-k composition CSV");
        metrics->add_option("--top-k", m_topk, "composition entries per snapshot");
        metrics->add_option("--alpha", m_alpha, "curvature idleness in [0,1)");
        metrics->add_flag("--no-curvature", m_no_curv, "skip Ollivier-Ricci");
        metrics->add_option("--workers", m_workers, "parallel snapshots");
        metrics->callback([&] {
            auto snaps = load_snapshots(m_dir);
            std::string csv = metrics_csv_header();
            std::vector<MetricsReport> reports(snaps.size());
            parallel_for(snaps.size(), m_workers, [&](std::size_t i) {
                reports[i] = compute_metrics(snaps[i], !m_no_curv, m_alpha, 1);
            });
            for (const auto& r : reports) csv += metrics_csv_row(r);
            write_file(m_out, csv);
            if (!m_comp.empty()) {
                std::string comp = "date,source,target,composition_length\n";
                for (const auto& s : snaps)
                    for (const auto& c : composition_length(s, static_cast<std::size_t>(m_topk)))
                        comp += csv_row({s.date, c.source, c.target, std::to_string(c.length)});
                write_file(m_comp, comp);
            }
        });

        // --------------------------------------------------------- cluster
        auto* cluster = app.add_subcommand("cluster", "t-SNE embedding + DBSCAN sweep");
        std::string c_snapshot, c_out = "clusters.json";
        double c_perplexity = 30.0;
        std::uint64_t c_seed = 42;
        unsigned c_workers = 1;
        cluster->add_option("--snapshot", c_snapshot, "snapshot JSON")->required();
        cluster->add_option("--perplexity", c_perplexity, "t-SNE perplexity");
        cluster->add_option("--seed", c_seed, "rng seed");
        cluster->add_option("--out", c_out, "clusters JSON");
        cluster->add_option("--workers", c_workers, "parallel sweep cells");
        cluster->callback([&] {
            auto snap = read_snapshot_json(slurp(c_snapshot));
            auto feats = node_features(snap);
            TsneOptions topt;
            topt.perplexity = c_perplexity;
            auto embedded = tsne(feats.standardized, c_seed, topt);
            SweepOptions sopt;
            sopt.workers = c_workers;
            auto [best, cells] = dbscan_sweep(embedded.embedding, sopt);
            std::string out = "{\"date\": " + json_quote(snap.date) +
                              ", \"n_clusters\": " + std::to_string(best.n_clusters) +
                              ", \"target_missed\": " + (best.target_missed ? "true" : "false") +
                              ", \"labels\": [";
            for (std::size_t i = 0; i < best.labels.size(); ++i) {
                if (i) out += ", ";
                out += std::to_string(best.labels[i]);
            }
            out += "]}\n";
            write_file(c_out, out);
            std::cerr << "clusters: " << best.n_clusters << " silhouette: "
                      << (best.silhouette ? std::to_string(*best.silhouette) : "n/a") << "\n";
        });

        // --------------------------------------------------------- sectors
        auto* sectors = app.add_subcommand("sectors", "Sector flows, rho, incident diagnostics");
        std::string s_dir, s_map, s_cats, s_event, s_orient = "in";
        std::string s_flows = "sector_flows.csv", s_matrix, s_incident = "incident.csv";
        int s_window = 4;
        bool s_intra = false;
        sectors->add_option("--snapshots", s_dir, "snapshot directory")->required();
        sectors->add_option("--sector-map", s_map, "category,sector CSV");
        sectors->add_option("--categories", s_cats, "protocol_id,category CSV");
        sectors->add_option("--orientation", s_orient, "in|out expansion orientation");
        sectors->add_flag("--include-intra", s_intra, "count intra-sector links");
        sectors->add_option("--event", s_event, "event date YYYY-MM-DD");
        sectors->add_option("--window", s_window, "weeks around the event");
        sectors->add_option("--out", s_incident, "incident CSV (with --event)");
        sectors->add_option("--flows-out", s_flows, "sector flow CSV");
        sectors->add_option("--matrix-out", s_matrix, "sector matrix CSV");
        sectors->callback([&] {
            auto snaps = load_snapshots(s_dir);
            auto smap = load_sectors(s_map, s_cats);
            auto orient = parse_orientation(s_orient);
            if (!orient) throw CLI::ValidationError("bad --orientation");
            auto flows = sector_flows(snaps, smap, *orient, s_intra);
            write_file(s_flows, sector_flows_csv(flows));
            if (!s_matrix.empty()) {
                std::string matrix_csv = "date,from_sector,to_sector,size\n";
                for (const auto& snap : snaps)
                    for (const auto& [key, size] : sector_matrix(snap, smap))
                        matrix_csv += csv_row({snap.date, key.first, key.second, size.str()});
                write_file(s_matrix, matrix_csv);
            }
            if (!s_event.empty()) {
                auto rows = incident_table(snaps, smap,
                                           {"Asset Management", "Trading & Exchanges"}, s_event,
                                           s_window);
                write_file(s_incident, incident_csv(rows));
            }
        });

        // ------------------------------------------------------------- var
        auto* var_cmd = app.add_subcommand("var", "Fit VAR on flow series and emit IRFs");
        std::string v_series, v_out = "irf.csv";
        int v_lags = 2, v_horizon = 12;
        var_cmd->add_option("--series", v_series, "sector flow CSV (from `sectors`)")->required();
        var_cmd->add_option("--lags", v_lags, "lag order");
        var_cmd->add_option("--horizon", v_horizon, "IRF horizon");
        var_cmd->add_option("--out", v_out, "IRF CSV");
        var_cmd->callback([&] {
            // long-format flows: date,sector,expansion,contraction,rho
            auto rows = parse_csv(slurp(v_series));
            std::map<std::string, std::size_t> dates;
            std::map<std::string, std::size_t> sectors_idx;
            for (std::size_t i = 1; i < rows.size(); ++i) {
                if (rows[i].size() < 4) continue;
                dates.try_emplace(rows[i][0], dates.size());
                sectors_idx.try_emplace(rows[i][1], sectors_idx.size());
            }
            Eigen::MatrixXd series = Eigen::MatrixXd::Zero(
                static_cast<Eigen::Index>(dates.size()),
                static_cast<Eigen::Index>(2 * sectors_idx.size()));
            for (std::size_t i = 1; i < rows.size(); ++i) {
                if (rows[i].size() < 4) continue;
                const auto r = static_cast<Eigen::Index>(dates[rows[i][0]]);
                const auto c = static_cast<Eigen::Index>(2 * sectors_idx[rows[i][1]]);
                series(r, c) = std::stod(rows[i][2]);
                series(r, c + 1) = std::stod(rows[i][3]);
            }
            std::vector<std::string> names(2 * sectors_idx.size());
            for (const auto& [sec, i] : sectors_idx) {
                names[2 * i] = sec + ":expansion";
                names[2 * i + 1] = sec + ":contraction";
            }
            // drop constant columns, as per-equation OLS rejects them
            std::vector<Eigen::Index> keep;
            for (Eigen::Index c = 0; c < series.cols(); ++c)
                if ((series.col(c).array() - series.col(c).mean()).abs().maxCoeff() > 1e-9)
                    keep.push_back(c);
            Eigen::MatrixXd kept(series.rows(), static_cast<Eigen::Index>(keep.size()));
            std::vector<std::string> kept_names;
            for (std::size_t i = 0; i < keep.size(); ++i) {
                kept.col(static_cast<Eigen::Index>(i)) = series.col(keep[i]);
                kept_names.push_back(names[static_cast<std::size_t>(keep[i])]);
            }
            auto model = fit_var(kept, kept_names, v_lags);
            if (!model.stable)
                std::cerr << "warning: VAR not stable (spectral radius " << model.spectral_radius
                          << ")\n";
            write_file(v_out, irf_csv(model, irf(model, v_horizon)));
        });

        // --------------------------------------------------------- predict
        auto* predict = app.add_subcommand("predict", "Temporal GNN link prediction");
        std::string p_dir, p_cfg, p_out = "eval.csv", p_model_out;
        std::uint64_t p_seed = 42;
        predict->add_option("--snapshots", p_dir, "snapshot directory")->required();
        predict->add_option("--config", p_cfg, "tgnn config (toml/json)");
        predict->add_option("--seed", p_seed, "rng seed");
        predict->add_option("--out", p_out, "eval CSV");
        predict->add_option("--model-out", p_model_out, "checkpoint JSON");
        predict->callback([&] {
            auto snaps = load_snapshots(p_dir);
            TgnnConfig tcfg;
            tcfg.seed = p_seed;
            if (!p_cfg.empty()) {
                const JVal root = parse_config_text(p_cfg, slurp(p_cfg));
                for (const auto& [k, v] : root.obj) {
                    if (k == "epochs_per_snapshot") tcfg.epochs_per_snapshot = static_cast<int>(v.as_i64());
                    else if (k == "learning_rate") tcfg.learning_rate = v.as_double();
                    else if (k == "early_stop_tol") tcfg.early_stop_tol = v.as_double();
                    else if (k == "optimizer") tcfg.use_adam = v.as_str() == "adam";
                    else throw std::runtime_error("tgnn config: unknown key '" + k + "'");
                }
            }
            TgnnModel model = TgnnModel::make(derive_seed(p_seed, "tgnn"));
            NodeStateBank bank;
            auto rows = train_live(model, bank, snaps, tcfg);
            write_file(p_out, eval_report_csv(rows));
            if (!p_model_out.empty()) write_file(p_model_out, write_model_json(model));
        });

        // ------------------------------------------------------------- run
        auto* run = app.add_subcommand("run", "Run the full pipeline from a config file");
        std::string r_cfg, r_only, r_out_override;
        unsigned r_workers = 0;
        run->add_option("--config", r_cfg, "pipeline config (toml/json)")->required();
        run->add_option("--only", r_only, "run a single stage");
        run->add_option("--out", r_out_override, "override run.out_dir");
        std::uint64_t r_seed_val = 0;
        auto* seed_opt = run->add_option("--seed", r_seed_val, "override run.seed");
        run->add_option("--workers", r_workers, "override run.workers");
        run->callback([&] {
            auto cfg = load_pipeline_config(r_cfg);
            if (!r_out_override.empty()) cfg.out_dir = r_out_override;
            if (seed_opt->count()) cfg.seed = r_seed_val;
            if (r_workers > 0) cfg.workers = r_workers;
            auto manifest = run_pipeline(cfg, r_only);
            std::cerr << manifest.stages.size() << " stages complete; manifest at "
                      << (fs::path(cfg.out_dir) / "manifest.json").string() << "\n";
        });

        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
