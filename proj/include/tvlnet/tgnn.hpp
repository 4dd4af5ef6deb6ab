#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tvlnet/csv.hpp"
#include "tvlnet/jval.hpp"
#include "tvlnet/snapshot.hpp"
#include "tvlnet/util.hpp"

namespace tvlnet {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// ------------------------------------------------------------------ model

struct LinearLayer {
    MatrixXd w;  // in x out
    VectorXd b;  // out
};

struct GruCell {
    MatrixXd wz, wr, wn;  // input x state
    MatrixXd uz, ur, un;  // state x state
    VectorXd bz, br, bn;
};

/// Width schedule: MLP 1->256->128, GCN 128->64 and 64->32, one GRU per GCN
/// level with matching state widths (64 and 32). Node embeddings carry dim
/// 32 into the dot-product link scorer.
struct TgnnWidths {
    int feature = 1;
    int mlp1 = 256;
    int mlp2 = 128;
    int gcn1 = 64;
    int gcn2 = 32;
};

struct TgnnModel {
    TgnnWidths widths;
    LinearLayer mlp1, mlp2, gcn1, gcn2;
    GruCell gru1, gru2;

    static TgnnModel make(std::uint64_t seed, TgnnWidths w = {}) {
        TgnnModel m;
        m.widths = w;
        Rng rng(derive_seed(seed, "tgnn-init"));
        auto glorot = [&](MatrixXd& mat, int in, int out) {
            const double s = std::sqrt(6.0 / (in + out));
            mat.resize(in, out);
            for (int i = 0; i < in; ++i)
                for (int j = 0; j < out; ++j) mat(i, j) = rng.range(-s, s);
        };
        auto linear = [&](LinearLayer& l, int in, int out) {
            glorot(l.w, in, out);
            l.b = VectorXd::Zero(out);
        };
        auto gru = [&](GruCell& g, int in, int state) {
            glorot(g.wz, in, state);
            glorot(g.wr, in, state);
            glorot(g.wn, in, state);
            glorot(g.uz, state, state);
            glorot(g.ur, state, state);
            glorot(g.un, state, state);
            g.bz = VectorXd::Zero(state);
            g.br = VectorXd::Zero(state);
            g.bn = VectorXd::Zero(state);
        };
        linear(m.mlp1, w.feature, w.mlp1);
        linear(m.mlp2, w.mlp1, w.mlp2);
        linear(m.gcn1, w.mlp2, w.gcn1);
        linear(m.gcn2, w.gcn1, w.gcn2);
        gru(m.gru1, w.gcn1, w.gcn1);
        gru(m.gru2, w.gcn2, w.gcn2);
        return m;
    }

    static TgnnModel zeros_like(const TgnnModel& other) {
        TgnnModel m = other;
        m.visit([](const std::string&, MatrixXd& mat) { mat.setZero(); },
                [](const std::string&, VectorXd& v) { v.setZero(); });
        return m;
    }

    template <typename MatFn, typename VecFn>
    void visit(MatFn&& mf, VecFn&& vf) {
        mf("mlp1.w", mlp1.w), vf("mlp1.b", mlp1.b);
        mf("mlp2.w", mlp2.w), vf("mlp2.b", mlp2.b);
        mf("gcn1.w", gcn1.w), vf("gcn1.b", gcn1.b);
        mf("gcn2.w", gcn2.w), vf("gcn2.b", gcn2.b);
        for (auto [name, cell] : {std::pair{"gru1", &gru1}, std::pair{"gru2", &gru2}}) {
            const std::string p(name);
            mf(p + ".wz", cell->wz), mf(p + ".wr", cell->wr), mf(p + ".wn", cell->wn);
            mf(p + ".uz", cell->uz), mf(p + ".ur", cell->ur), mf(p + ".un", cell->un);
            vf(p + ".bz", cell->bz), vf(p + ".br", cell->br), vf(p + ".bn", cell->bn);
        }
    }

    std::size_t param_count() const {
        std::size_t n = 0;
        const_cast<TgnnModel*>(this)->visit(
            [&](const std::string&, MatrixXd& m) { n += static_cast<std::size_t>(m.size()); },
            [&](const std::string&, VectorXd& v) { n += static_cast<std::size_t>(v.size()); });
        return n;
    }

    /// Closed-form count from the width schedule alone.
    static std::size_t expected_param_count(const TgnnWidths& w) {
        auto linear = [](int in, int out) {
            return static_cast<std::size_t>(in) * out + static_cast<std::size_t>(out);
        };
        auto gru = [&](int in, int state) {
            return 3 * (static_cast<std::size_t>(in) * state +
                        static_cast<std::size_t>(state) * state + static_cast<std::size_t>(state));
        };
        return linear(w.feature, w.mlp1) + linear(w.mlp1, w.mlp2) + linear(w.mlp2, w.gcn1) +
               linear(w.gcn1, w.gcn2) + gru(w.gcn1, w.gcn1) + gru(w.gcn2, w.gcn2);
    }
};

/// Hidden states carried across snapshots, keyed by node id. Nodes first
/// seen at an interval start from zeros.
struct NodeStateBank {
    std::map<std::string, std::pair<VectorXd, VectorXd>> states;  // (gru1, gru2)
};

// ---------------------------------------------------------------- forward

namespace detail {

inline MatrixXd sigmoid(const MatrixXd& x) {
    return x.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
}

struct GruCache {
    MatrixXd x, hprev, z, r, c, h;
};

inline GruCache gru_forward(const GruCell& cell, const MatrixXd& x, const MatrixXd& hprev) {
    GruCache cache;
    cache.x = x;
    cache.hprev = hprev;
    const auto ones = VectorXd::Ones(x.rows());
    cache.z = sigmoid(x * cell.wz + hprev * cell.uz + ones * cell.bz.transpose());
    cache.r = sigmoid(x * cell.wr + hprev * cell.ur + ones * cell.br.transpose());
    cache.c = (x * cell.wn + (cache.r.cwiseProduct(hprev)) * cell.un +
               ones * cell.bn.transpose())
                  .array()
                  .tanh();
    cache.h = (1.0 - cache.z.array()) * cache.c.array() + cache.z.array() * cache.hprev.array();
    return cache;
}

/// Backward through one GRU step. Accumulates parameter grads into `g` and
/// returns the gradient w.r.t. the input; the carried state is treated as a
/// constant (no backprop through time in the live-update regime).
inline MatrixXd gru_backward(const GruCell& cell, GruCell& g, const GruCache& cache,
                             const MatrixXd& dh) {
    const MatrixXd dz = dh.cwiseProduct(cache.hprev - cache.c);
    const MatrixXd dc = dh.cwiseProduct(MatrixXd::Ones(dh.rows(), dh.cols()) - cache.z);
    const MatrixXd dc_pre =
        dc.cwiseProduct((1.0 - cache.c.array().square()).matrix());
    const MatrixXd rh = cache.r.cwiseProduct(cache.hprev);

    g.wn += cache.x.transpose() * dc_pre;
    g.un += rh.transpose() * dc_pre;
    g.bn += dc_pre.colwise().sum().transpose();
    MatrixXd dx = dc_pre * cell.wn.transpose();
    const MatrixXd drh = dc_pre * cell.un.transpose();
    const MatrixXd dr = drh.cwiseProduct(cache.hprev);

    const MatrixXd dz_pre =
        dz.cwiseProduct(cache.z.cwiseProduct(MatrixXd::Ones(dz.rows(), dz.cols()) - cache.z));
    g.wz += cache.x.transpose() * dz_pre;
    g.uz += cache.hprev.transpose() * dz_pre;
    g.bz += dz_pre.colwise().sum().transpose();
    dx += dz_pre * cell.wz.transpose();

    const MatrixXd dr_pre =
        dr.cwiseProduct(cache.r.cwiseProduct(MatrixXd::Ones(dr.rows(), dr.cols()) - cache.r));
    g.wr += cache.x.transpose() * dr_pre;
    g.ur += cache.hprev.transpose() * dr_pre;
    g.br += dr_pre.colwise().sum().transpose();
    dx += dr_pre * cell.wr.transpose();
    return dx;
}

}  // namespace detail

struct TgnnForward {
    std::vector<std::string> ids;
    std::map<std::string, int> index;
    Eigen::SparseMatrix<double> ahat;  // sym-normalized undirected adjacency + self loops
    MatrixXd x;                        // n x 1 scaled node features
    MatrixXd z1, a1;                   // mlp1 pre/post rectifier
    MatrixXd z2;                       // mlp2 output
    MatrixXd az2;                      // ahat * z2 (cached for grads)
    MatrixXd g1_pre, g1;               // gcn1 pre/post rectifier
    detail::GruCache gru1;
    MatrixXd ah1;                      // ahat * h1
    MatrixXd g2;                       // gcn2 output (no rectifier)
    detail::GruCache gru2;

    const MatrixXd& embeddings() const { return gru2.h; }
};

/// Node feature per the input contract: the scalar node weight, log1p-scaled
/// and z-scored over the snapshot.
inline MatrixXd tgnn_node_features(const NetworkSnapshot& snap) {
    const int n = static_cast<int>(snap.nodes.size());
    MatrixXd x(n, 1);
    for (int i = 0; i < n; ++i)
        x(i, 0) = std::log1p(std::max(0.0, snap.nodes[static_cast<std::size_t>(i)].size.to_double()));
    const double mean = x.col(0).mean();
    const double sd = std::sqrt((x.col(0).array() - mean).square().sum() / std::max(1, n));
    if (sd > 0)
        x.col(0) = (x.col(0).array() - mean) / sd;
    else
        x.col(0).setZero();
    return x;
}

inline TgnnForward tgnn_forward(const TgnnModel& model, const NodeStateBank& bank,
                                const NetworkSnapshot& snap) {
    TgnnForward f;
    const int n = static_cast<int>(snap.nodes.size());
    if (n == 0) throw std::invalid_argument("tgnn_forward: empty snapshot");
    f.ids.reserve(static_cast<std::size_t>(n));
    for (const auto& node : snap.nodes) {
        f.index[node.id] = static_cast<int>(f.ids.size());
        f.ids.push_back(node.id);
    }

    // undirected projection with self loops, D^{-1/2} (A + I) D^{-1/2}
    std::set<std::pair<int, int>> und;
    for (const auto& l : snap.links) {
        auto s = f.index.find(l.source);
        auto t = f.index.find(l.target);
        if (s == f.index.end() || t == f.index.end() || s->second == t->second) continue;
        und.insert(std::minmax(s->second, t->second));
    }
    std::vector<double> deg(static_cast<std::size_t>(n), 1.0);  // self loop
    for (const auto& [u, v] : und) {
        deg[static_cast<std::size_t>(u)] += 1.0;
        deg[static_cast<std::size_t>(v)] += 1.0;
    }
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(und.size() * 2 + static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        trips.emplace_back(i, i, 1.0 / deg[static_cast<std::size_t>(i)]);
    for (const auto& [u, v] : und) {
        const double w = 1.0 / std::sqrt(deg[static_cast<std::size_t>(u)] *
                                         deg[static_cast<std::size_t>(v)]);
        trips.emplace_back(u, v, w);
        trips.emplace_back(v, u, w);
    }
    f.ahat.resize(n, n);
    f.ahat.setFromTriplets(trips.begin(), trips.end());

    f.x = tgnn_node_features(snap);
    const auto ones = VectorXd::Ones(n);

    f.z1 = f.x * model.mlp1.w + ones * model.mlp1.b.transpose();
    f.a1 = f.z1.cwiseMax(0.0);
    f.z2 = f.a1 * model.mlp2.w + ones * model.mlp2.b.transpose();

    f.az2 = f.ahat * f.z2;
    f.g1_pre = f.az2 * model.gcn1.w + ones * model.gcn1.b.transpose();
    f.g1 = f.g1_pre.cwiseMax(0.0);

    MatrixXd h1_prev = MatrixXd::Zero(n, model.widths.gcn1);
    MatrixXd h2_prev = MatrixXd::Zero(n, model.widths.gcn2);
    for (int i = 0; i < n; ++i) {
        auto it = bank.states.find(f.ids[static_cast<std::size_t>(i)]);
        if (it == bank.states.end()) continue;
        h1_prev.row(i) = it->second.first.transpose();
        h2_prev.row(i) = it->second.second.transpose();
    }
    f.gru1 = detail::gru_forward(model.gru1, f.g1, h1_prev);

    f.ah1 = f.ahat * f.gru1.h;
    f.g2 = f.ah1 * model.gcn2.w + ones * model.gcn2.b.transpose();
    f.gru2 = detail::gru_forward(model.gru2, f.g2, h2_prev);
    return f;
}

inline void update_bank(NodeStateBank& bank, const TgnnForward& f) {
    for (std::size_t i = 0; i < f.ids.size(); ++i)
        bank.states[f.ids[i]] = {f.gru1.h.row(static_cast<Eigen::Index>(i)).transpose(),
                                 f.gru2.h.row(static_cast<Eigen::Index>(i)).transpose()};
}

// ----------------------------------------------------------------- scoring

/// Link likelihood: sigmoid of the embedding dot product. Symmetric in its
/// arguments.
inline double tgnn_score(const MatrixXd& embeddings, int p, int q) {
    const double dot = embeddings.row(p).dot(embeddings.row(q));
    return 1.0 / (1.0 + std::exp(-dot));
}

inline double tgnn_score(const TgnnForward& f, const std::string& p, const std::string& q) {
    auto ip = f.index.find(p);
    auto iq = f.index.find(q);
    if (ip == f.index.end() || iq == f.index.end())
        throw std::invalid_argument("tgnn_score: unknown node");
    return tgnn_score(f.embeddings(), ip->second, iq->second);
}

struct CandidateSet {
    std::vector<std::pair<int, int>> pairs;  // indices into the forward's node order
    std::vector<double> labels;
    std::size_t n_pos = 0;
    std::size_t n_neg = 0;
};

/// Positives: edges of the next snapshot projected onto embedded nodes, as
/// unordered pairs (the scorer is symmetric). Negatives: an equal-count
/// uniform sample of unordered non-adjacent pairs, without replacement.
inline CandidateSet make_candidates(const TgnnForward& f, const NetworkSnapshot& next,
                                    Rng& rng) {
    CandidateSet cs;
    std::set<std::pair<int, int>> pos;
    for (const auto& l : next.links) {
        auto s = f.index.find(l.source);
        auto t = f.index.find(l.target);
        if (s == f.index.end() || t == f.index.end() || s->second == t->second) continue;
        pos.insert(std::minmax(s->second, t->second));
    }
    const int n = static_cast<int>(f.ids.size());
    const std::size_t all_pairs = static_cast<std::size_t>(n) * (n - 1) / 2;
    const std::size_t max_neg = all_pairs > pos.size() ? all_pairs - pos.size() : 0;
    const std::size_t want_neg = std::min(pos.size(), max_neg);

    for (const auto& [u, v] : pos) {
        cs.pairs.emplace_back(u, v);
        cs.labels.push_back(1.0);
    }
    cs.n_pos = pos.size();

    std::set<std::pair<int, int>> taken;
    while (taken.size() < want_neg) {
        const int u = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
        const int v = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
        if (u == v) continue;
        const auto key = std::minmax(u, v);
        if (pos.count({key.first, key.second})) continue;
        if (!taken.insert({key.first, key.second}).second) continue;
        cs.pairs.emplace_back(key.first, key.second);
        cs.labels.push_back(0.0);
    }
    cs.n_neg = taken.size();
    return cs;
}

// ------------------------------------------------------ loss and backward

/// Binary cross-entropy summed over candidate pairs, computed on logits for
/// stability. Sum reduction keeps the per-pair gradient scale independent of
/// the candidate count. Gradients are accumulated into `grads` when non-null.
inline double tgnn_loss_backward(const TgnnModel& model, const TgnnForward& f,
                                 const CandidateSet& cs, TgnnModel* grads) {
    const MatrixXd& h = f.embeddings();
    const std::size_t count = cs.pairs.size();
    if (count == 0) return 0.0;
    double loss = 0;
    MatrixXd dh2 = MatrixXd::Zero(h.rows(), h.cols());
    for (std::size_t i = 0; i < count; ++i) {
        const auto [p, q] = cs.pairs[i];
        const double y = cs.labels[i];
        const double d = h.row(p).dot(h.row(q));
        // log(1 + e^-|d|) + max(d,0) - d*y
        loss += std::log1p(std::exp(-std::abs(d))) + std::max(d, 0.0) - d * y;
        if (grads) {
            const double sig = 1.0 / (1.0 + std::exp(-d));
            const double dd = sig - y;
            dh2.row(p) += dd * h.row(q);
            dh2.row(q) += dd * h.row(p);
        }
    }
    if (!grads) return loss;

    // gru2 <- gcn2 <- gru1 <- gcn1 <- mlp2 <- mlp1
    const MatrixXd dg2 = detail::gru_backward(model.gru2, grads->gru2, f.gru2, dh2);
    grads->gcn2.w += f.ah1.transpose() * dg2;
    grads->gcn2.b += dg2.colwise().sum().transpose();
    const MatrixXd dh1 = f.ahat * (dg2 * model.gcn2.w.transpose());

    const MatrixXd dg1 = detail::gru_backward(model.gru1, grads->gru1, f.gru1, dh1);
    const MatrixXd dg1_pre =
        dg1.cwiseProduct((f.g1_pre.array() > 0.0).cast<double>().matrix());
    grads->gcn1.w += f.az2.transpose() * dg1_pre;
    grads->gcn1.b += dg1_pre.colwise().sum().transpose();
    const MatrixXd dz2 = f.ahat * (dg1_pre * model.gcn1.w.transpose());

    grads->mlp2.w += f.a1.transpose() * dz2;
    grads->mlp2.b += dz2.colwise().sum().transpose();
    const MatrixXd da1 = dz2 * model.mlp2.w.transpose();
    const MatrixXd dz1 = da1.cwiseProduct((f.z1.array() > 0.0).cast<double>().matrix());
    grads->mlp1.w += f.x.transpose() * dz1;
    grads->mlp1.b += dz1.colwise().sum().transpose();
    return loss;
}

// ---------------------------------------------------------------- metrics

/// Area under the precision-recall curve as the recall-weighted sum of
/// precisions over distinct score thresholds (items sharing a score enter
/// together, which is the pessimistic tie handling). Requires at least one
/// positive label.
inline double auprc(const std::vector<double>& scores, const std::vector<double>& labels) {
    if (scores.size() != labels.size())
        throw std::invalid_argument("auprc: scores/labels size mismatch");
    double total_pos = 0;
    for (double y : labels) total_pos += y;
    if (total_pos <= 0) throw std::invalid_argument("auprc: no positive labels");

    std::vector<std::size_t> order(scores.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return scores[a] > scores[b];
    });

    double area = 0;
    double tp = 0, fp = 0, prev_recall = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        const double threshold = scores[order[i]];
        while (i < order.size() && scores[order[i]] == threshold) {
            if (labels[order[i]] > 0.5)
                tp += 1;
            else
                fp += 1;
            ++i;
        }
        const double precision = tp / (tp + fp);
        const double recall = tp / total_pos;
        area += precision * (recall - prev_recall);
        prev_recall = recall;
    }
    return area;
}

// --------------------------------------------------------------- training

struct TgnnConfig {
    int epochs_per_snapshot = 50;
    double early_stop_tol = 1e-4;
    double learning_rate = 0.01;
    bool use_adam = false;  // plain gradient descent by default
    std::uint64_t seed = 0;
};

struct EvalRow {
    std::string date;  // snapshot whose edges were predicted
    std::optional<double> auprc;
    std::size_t n_pos = 0;
    std::size_t n_neg = 0;
    std::size_t n_nodes = 0;
    std::size_t n_edges = 0;
    int epochs_run = 0;
    std::string note;
};

namespace detail {

struct AdamState {
    TgnnModel m1, m2;
    int t = 0;
};

inline void apply_gradients(TgnnModel& model, TgnnModel& grads, const TgnnConfig& cfg,
                            AdamState* adam) {
    std::map<std::string, MatrixXd*> gm;
    std::map<std::string, VectorXd*> gv;
    grads.visit([&](const std::string& n, MatrixXd& x) { gm[n] = &x; },
                [&](const std::string& n, VectorXd& x) { gv[n] = &x; });
    if (!cfg.use_adam) {
        model.visit(
            [&](const std::string& n, MatrixXd& p) { p -= cfg.learning_rate * *gm[n]; },
            [&](const std::string& n, VectorXd& p) { p -= cfg.learning_rate * *gv[n]; });
        return;
    }
    ++adam->t;
    const double b1 = 0.9, b2 = 0.999, eps = 1e-8;
    const double bc1 = 1.0 - std::pow(b1, adam->t);
    const double bc2 = 1.0 - std::pow(b2, adam->t);
    auto step = [&](auto& p, auto& g, auto& m1, auto& m2) {
        m1 = b1 * m1 + (1 - b1) * g;
        m2 = (b2 * m2.array() + (1 - b2) * g.array().square()).matrix();
        p -= (cfg.learning_rate * (m1.array() / bc1) /
              ((m2.array() / bc2).sqrt() + eps))
                 .matrix();
    };
    std::map<std::string, MatrixXd*> m1m, m2m;
    std::map<std::string, VectorXd*> m1v, m2v;
    adam->m1.visit([&](const std::string& n, MatrixXd& x) { m1m[n] = &x; },
                   [&](const std::string& n, VectorXd& x) { m1v[n] = &x; });
    adam->m2.visit([&](const std::string& n, MatrixXd& x) { m2m[n] = &x; },
                   [&](const std::string& n, VectorXd& x) { m2v[n] = &x; });
    model.visit(
        [&](const std::string& n, MatrixXd& p) { step(p, *gm[n], *m1m[n], *m2m[n]); },
        [&](const std::string& n, VectorXd& p) { step(p, *gv[n], *m1v[n], *m2v[n]); });
}

}  // namespace detail

/// Live-update training over a snapshot sequence: for each step tau the
/// model first predicts the edges of snapshot tau+1 from embeddings built
/// on snapshot tau (scored before any training on those edges), then trains
/// on them for up to `epochs_per_snapshot` epochs with fresh negative
/// samples per epoch. Early stopping watches the loss on a fixed candidate
/// set so the resampling noise cannot fake a plateau; training halts once
/// that loss improves by less than `early_stop_tol`. Node states advance
/// through the bank after training.
inline std::vector<EvalRow> train_live(TgnnModel& model, NodeStateBank& bank,
                                       const std::vector<NetworkSnapshot>& snapshots,
                                       const TgnnConfig& cfg) {
    if (snapshots.size() < 2)
        throw std::invalid_argument("train_live: need at least 2 snapshots");
    std::vector<EvalRow> report;
    detail::AdamState adam;
    if (cfg.use_adam) {
        adam.m1 = TgnnModel::zeros_like(model);
        adam.m2 = TgnnModel::zeros_like(model);
    }

    for (std::size_t tau = 0; tau + 1 < snapshots.size(); ++tau) {
        const NetworkSnapshot& cur = snapshots[tau];
        const NetworkSnapshot& next = snapshots[tau + 1];
        EvalRow row;
        row.date = next.date;
        row.n_nodes = next.nodes.size();
        row.n_edges = next.links.size();
        if (cur.nodes.empty() || next.nodes.empty()) {
            row.note = "empty snapshot, skipped";
            report.push_back(std::move(row));
            continue;
        }

        // evaluation before training on these edges; the same fixed
        // candidate set doubles as the early-stop monitor
        TgnnForward f = tgnn_forward(model, bank, cur);
        Rng eval_rng(derive_seed(cfg.seed, "eval-" + std::to_string(tau)));
        const CandidateSet monitor_cs = make_candidates(f, next, eval_rng);
        row.n_pos = monitor_cs.n_pos;
        row.n_neg = monitor_cs.n_neg;
        if (monitor_cs.n_pos > 0) {
            std::vector<double> scores;
            scores.reserve(monitor_cs.pairs.size());
            for (const auto& [p, q] : monitor_cs.pairs)
                scores.push_back(tgnn_score(f.embeddings(), p, q));
            row.auprc = auprc(scores, monitor_cs.labels);
        } else {
            row.note = "no positive candidates";
        }

        double prev_loss = std::numeric_limits<double>::infinity();
        for (int epoch = 0; epoch < cfg.epochs_per_snapshot; ++epoch) {
            Rng neg_rng(derive_seed(cfg.seed, "train-" + std::to_string(tau) + "-" +
                                                  std::to_string(epoch)));
            TgnnForward ft = tgnn_forward(model, bank, cur);
            const CandidateSet cs = make_candidates(ft, next, neg_rng);
            if (cs.pairs.empty()) break;
            TgnnModel grads = TgnnModel::zeros_like(model);
            tgnn_loss_backward(model, ft, cs, &grads);
            detail::apply_gradients(model, grads, cfg, &adam);
            ++row.epochs_run;
            TgnnForward fm = tgnn_forward(model, bank, cur);
            const double monitor = tgnn_loss_backward(model, fm, monitor_cs, nullptr);
            if (prev_loss - monitor < cfg.early_stop_tol) break;
            prev_loss = monitor;
        }

        // advance node memory with the trained parameters
        update_bank(bank, tgnn_forward(model, bank, cur));
        report.push_back(std::move(row));
    }
    return report;
}

/// Scores a held snapshot's edges with the current model and bank, using the
/// embeddings of `context` (typically the latest training snapshot).
inline EvalRow evaluate_next(const TgnnModel& model, const NodeStateBank& bank,
                             const NetworkSnapshot& context, const NetworkSnapshot& held,
                             std::uint64_t seed) {
    EvalRow row;
    row.date = held.date;
    row.n_nodes = held.nodes.size();
    row.n_edges = held.links.size();
    TgnnForward f = tgnn_forward(model, bank, context);
    Rng rng(derive_seed(seed, "held-eval"));
    const CandidateSet cs = make_candidates(f, held, rng);
    row.n_pos = cs.n_pos;
    row.n_neg = cs.n_neg;
    if (cs.n_pos > 0) {
        std::vector<double> scores;
        scores.reserve(cs.pairs.size());
        for (const auto& [p, q] : cs.pairs) scores.push_back(tgnn_score(f.embeddings(), p, q));
        row.auprc = auprc(scores, cs.labels);
    } else {
        row.note = "no positive candidates";
    }
    return row;
}

inline std::string eval_report_csv(const std::vector<EvalRow>& rows) {
    std::string out = "date,auprc,n_pos,n_neg,n_nodes,n_edges,epochs_run,note\n";
    for (const auto& r : rows) {
        std::string a;
        if (r.auprc) {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.12g", *r.auprc);
            a = buf;
        }
        out += csv_row({r.date, a, std::to_string(r.n_pos), std::to_string(r.n_neg),
                        std::to_string(r.n_nodes), std::to_string(r.n_edges),
                        std::to_string(r.epochs_run), r.note});
    }
    return out;
}

// ------------------------------------------------------------- checkpoint

inline std::string write_model_json(const TgnnModel& model) {
    std::string out = "{\n  \"version\": 1,\n  \"widths\": [" +
                      std::to_string(model.widths.feature) + ", " +
                      std::to_string(model.widths.mlp1) + ", " +
                      std::to_string(model.widths.mlp2) + ", " +
                      std::to_string(model.widths.gcn1) + ", " +
                      std::to_string(model.widths.gcn2) + "],\n  \"tensors\": {\n";
    std::vector<std::string> parts;
    auto dump = [&](const std::string& name, const double* data, Eigen::Index rows,
                    Eigen::Index cols) {
        std::string s = "    " + json_quote(name) + ": {\"rows\": " + std::to_string(rows) +
                        ", \"cols\": " + std::to_string(cols) + ", \"data\": [";
        char buf[32];
        for (Eigen::Index i = 0; i < rows * cols; ++i) {
            std::snprintf(buf, sizeof(buf), "%.17g", data[i]);
            if (i) s += ", ";
            s += buf;
        }
        s += "]}";
        parts.push_back(std::move(s));
    };
    const_cast<TgnnModel&>(model).visit(
        [&](const std::string& n, MatrixXd& m) { dump(n, m.data(), m.rows(), m.cols()); },
        [&](const std::string& n, VectorXd& v) { dump(n, v.data(), v.size(), 1); });
    for (std::size_t i = 0; i < parts.size(); ++i)
        out += parts[i] + (i + 1 < parts.size() ? ",\n" : "\n");
    out += "  }\n}\n";
    return out;
}

inline TgnnModel read_model_json(std::string_view text) {
    JVal root = parse_json(text);
    if (root.at("version").as_i64() != 1)
        throw std::runtime_error("read_model_json: unsupported version");
    const auto& w = root.at("widths").arr;
    if (w.size() != 5) throw std::runtime_error("read_model_json: bad widths");
    TgnnWidths widths{static_cast<int>(w[0].as_i64()), static_cast<int>(w[1].as_i64()),
                      static_cast<int>(w[2].as_i64()), static_cast<int>(w[3].as_i64()),
                      static_cast<int>(w[4].as_i64())};
    TgnnModel model = TgnnModel::make(0, widths);
    const JVal& tensors = root.at("tensors");
    auto load = [&](const std::string& name, double* data, Eigen::Index rows,
                    Eigen::Index cols) {
        const JVal& t = tensors.at(name);
        if (t.at("rows").as_i64() != rows || t.at("cols").as_i64() != cols)
            throw std::runtime_error("read_model_json: shape mismatch for " + name);
        const auto& arr = t.at("data").arr;
        if (static_cast<Eigen::Index>(arr.size()) != rows * cols)
            throw std::runtime_error("read_model_json: data length mismatch for " + name);
        for (Eigen::Index i = 0; i < rows * cols; ++i) data[i] = arr[static_cast<std::size_t>(i)].as_double();
    };
    model.visit(
        [&](const std::string& n, MatrixXd& m) { load(n, m.data(), m.rows(), m.cols()); },
        [&](const std::string& n, VectorXd& v) { load(n, v.data(), v.size(), 1); });
    return model;
}

}  // namespace tvlnet
