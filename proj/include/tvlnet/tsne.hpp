#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "tvlnet/util.hpp"

namespace tvlnet {

struct TsneOptions {
    double perplexity = 30.0;
    int iterations = 1000;
    double learning_rate = 200.0;
    int momentum_switch_iter = 250;   // 0.5 before, 0.8 after
    double early_exaggeration = 12.0; // applied until momentum_switch_iter
    double entropy_tol = 1e-5;        // bisection target tolerance, in nats
};

struct TsneResult {
    Eigen::MatrixXd embedding;  // n x 2
    double kl_initial = 0.0;    // KL(P||Q) at the seeded start
    double kl_final = 0.0;
};

namespace detail {

/// Squared Euclidean distances between rows.
inline Eigen::MatrixXd pairwise_sq_dist(const Eigen::MatrixXd& x) {
    const Eigen::VectorXd sq = x.rowwise().squaredNorm();
    Eigen::MatrixXd d = sq.replicate(1, x.rows()) + sq.transpose().replicate(x.rows(), 1) -
                        2.0 * x * x.transpose();
    return d.cwiseMax(0.0);
}

/// Row-conditional distribution at a given precision beta = 1/(2 sigma^2);
/// returns its Shannon entropy in nats.
inline double row_distribution(const Eigen::MatrixXd& d2, int i, double beta,
                               Eigen::VectorXd& p) {
    const int n = static_cast<int>(d2.rows());
    p.setZero(n);
    double sum = 0;
    for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        const double v = std::exp(-beta * d2(i, j));
        p(j) = v;
        sum += v;
    }
    if (sum <= 0) {  // all mass collapsed; spread uniformly
        for (int j = 0; j < n; ++j) p(j) = j == i ? 0.0 : 1.0 / (n - 1);
        return std::log(static_cast<double>(n - 1));
    }
    double h = 0;
    for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        p(j) /= sum;
        if (p(j) > 0) h -= p(j) * std::log(p(j));
    }
    return h;
}

/// Symmetrized joint probabilities with per-row precisions calibrated by
/// bisection so each conditional entropy hits ln(perplexity).
inline Eigen::MatrixXd joint_probabilities(const Eigen::MatrixXd& x, double perplexity,
                                           double tol) {
    const int n = static_cast<int>(x.rows());
    const double target = std::log(perplexity);
    const Eigen::MatrixXd d2 = pairwise_sq_dist(x);
    Eigen::MatrixXd cond(n, n);
    Eigen::VectorXd row(n);
    for (int i = 0; i < n; ++i) {
        double beta = 1.0, lo = 0.0, hi = std::numeric_limits<double>::infinity();
        double h = row_distribution(d2, i, beta, row);
        for (int step = 0; step < 200 && std::abs(h - target) > tol; ++step) {
            if (h > target) {  // too flat: sharpen
                lo = beta;
                beta = std::isinf(hi) ? beta * 2.0 : (lo + hi) / 2.0;
            } else {
                hi = beta;
                beta = (lo + hi) / 2.0;
            }
            h = row_distribution(d2, i, beta, row);
        }
        cond.row(i) = row.transpose();
    }
    Eigen::MatrixXd p = (cond + cond.transpose()) / (2.0 * n);
    return p.cwiseMax(1e-12);
}

/// Student-t affinities and the KL objective for an embedding.
inline double kl_divergence(const Eigen::MatrixXd& p, const Eigen::MatrixXd& y) {
    const int n = static_cast<int>(y.rows());
    const Eigen::MatrixXd d2 = pairwise_sq_dist(y);
    double qsum = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) qsum += 1.0 / (1.0 + d2(i, j));
    double kl = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            const double q = std::max(1e-12, (1.0 / (1.0 + d2(i, j))) / qsum);
            kl += p(i, j) * std::log(p(i, j) / q);
        }
    return kl;
}

/// Analytic KL gradient: 4 sum_j (p_ij - q_ij) w_ij (y_i - y_j).
inline Eigen::MatrixXd kl_gradient(const Eigen::MatrixXd& p, const Eigen::MatrixXd& y) {
    const int n = static_cast<int>(y.rows());
    const Eigen::MatrixXd d2 = pairwise_sq_dist(y);
    Eigen::MatrixXd w(n, n);
    double qsum = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            w(i, j) = i == j ? 0.0 : 1.0 / (1.0 + d2(i, j));
            qsum += w(i, j);
        }
    Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(n, y.cols());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            const double q = std::max(1e-12, w(i, j) / qsum);
            const double mult = 4.0 * (p(i, j) - q) * w(i, j);
            grad.row(i) += mult * (y.row(i) - y.row(j));
        }
    return grad;
}

}  // namespace detail

/// Exact O(n^2) t-SNE to two dimensions. Deterministic for a fixed seed;
/// requires n > 3 * perplexity.
inline TsneResult tsne(const Eigen::MatrixXd& features, std::uint64_t seed,
                       TsneOptions opts = {}) {
    const int n = static_cast<int>(features.rows());
    if (opts.perplexity <= 1.0) throw std::invalid_argument("tsne: perplexity must exceed 1");
    if (static_cast<double>(n) <= 3.0 * opts.perplexity)
        throw std::invalid_argument("tsne: need n > 3*perplexity");

    const Eigen::MatrixXd p = detail::joint_probabilities(features, opts.perplexity,
                                                          opts.entropy_tol);

    Rng rng(derive_seed(seed, "tsne-init"));
    Eigen::MatrixXd y(n, 2);
    for (int i = 0; i < n; ++i)
        for (int c = 0; c < 2; ++c) y(i, c) = rng.normal() * 1e-2;

    TsneResult result;
    result.kl_initial = detail::kl_divergence(p, y);

    Eigen::MatrixXd velocity = Eigen::MatrixXd::Zero(n, 2);
    for (int iter = 0; iter < opts.iterations; ++iter) {
        const bool early = iter < opts.momentum_switch_iter;
        const double momentum = early ? 0.5 : 0.8;
        const Eigen::MatrixXd p_eff = early ? (p * opts.early_exaggeration).eval() : p;
        const Eigen::MatrixXd grad = detail::kl_gradient(p_eff, y);
        velocity = momentum * velocity - opts.learning_rate * grad;
        y += velocity;
        y.rowwise() -= y.colwise().mean();  // keep the embedding centered
    }
    result.kl_final = detail::kl_divergence(p, y);
    result.embedding = std::move(y);
    return result;
}

}  // namespace tvlnet
