#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "tvlnet/util.hpp"

namespace tvlnet {

/// DBSCAN with Euclidean distances. A point is core when its eps-ball holds
/// at least min_samples points counting itself. Clusters are the connected
/// components of the core points; border points attach to their nearest core
/// (distance ties broken by the core's coordinates, then index, so the
/// partition does not depend on input order). Labels are canonicalized by
/// each cluster's smallest member index; noise is -1.
inline std::vector<int> dbscan(const Eigen::MatrixXd& points, double eps, int min_samples) {
    if (eps <= 0) throw std::invalid_argument("dbscan: eps must be positive");
    if (min_samples < 1) throw std::invalid_argument("dbscan: min_samples must be >= 1");
    const int n = static_cast<int>(points.rows());
    std::vector<int> labels(static_cast<std::size_t>(n), -1);
    if (n == 0) return labels;

    const double eps2 = eps * eps;
    auto d2 = [&](int a, int b) { return (points.row(a) - points.row(b)).squaredNorm(); };

    std::vector<std::vector<int>> neighbors(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (d2(i, j) <= eps2) {
                neighbors[static_cast<std::size_t>(i)].push_back(j);
                neighbors[static_cast<std::size_t>(j)].push_back(i);
            }

    std::vector<char> core(static_cast<std::size_t>(n), 0);
    for (int i = 0; i < n; ++i)
        core[static_cast<std::size_t>(i)] =
            static_cast<int>(neighbors[static_cast<std::size_t>(i)].size()) + 1 >= min_samples;

    // components over core points
    std::vector<int> comp(static_cast<std::size_t>(n), -1);
    int n_comp = 0;
    for (int s = 0; s < n; ++s) {
        if (!core[static_cast<std::size_t>(s)] || comp[static_cast<std::size_t>(s)] >= 0)
            continue;
        std::deque<int> q{s};
        comp[static_cast<std::size_t>(s)] = n_comp;
        while (!q.empty()) {
            const int u = q.front();
            q.pop_front();
            for (int v : neighbors[static_cast<std::size_t>(u)]) {
                if (core[static_cast<std::size_t>(v)] && comp[static_cast<std::size_t>(v)] < 0) {
                    comp[static_cast<std::size_t>(v)] = n_comp;
                    q.push_back(v);
                }
            }
        }
        ++n_comp;
    }

    // border points: nearest core neighbor within eps
    for (int i = 0; i < n; ++i) {
        if (core[static_cast<std::size_t>(i)]) continue;
        int best = -1;
        double best_d = 0;
        for (int v : neighbors[static_cast<std::size_t>(i)]) {
            if (!core[static_cast<std::size_t>(v)]) continue;
            const double d = d2(i, v);
            bool better = best < 0 || d < best_d;
            if (!better && d == best_d) {
                // deterministic geometric tie-break, index as a last resort
                bool decided = false;
                for (int c = 0; c < points.cols(); ++c) {
                    if (points(v, c) != points(best, c)) {
                        better = points(v, c) < points(best, c);
                        decided = true;
                        break;
                    }
                }
                if (!decided) better = v < best;
            }
            if (better) {
                best = v;
                best_d = d;
            }
        }
        if (best >= 0) comp[static_cast<std::size_t>(i)] = comp[static_cast<std::size_t>(best)];
    }

    // canonical numbering by smallest member index
    std::vector<int> first_seen(static_cast<std::size_t>(n_comp), -1);
    int next = 0;
    for (int i = 0; i < n; ++i) {
        const int c = comp[static_cast<std::size_t>(i)];
        if (c < 0) continue;
        if (first_seen[static_cast<std::size_t>(c)] < 0) first_seen[static_cast<std::size_t>(c)] = next++;
        labels[static_cast<std::size_t>(i)] = first_seen[static_cast<std::size_t>(c)];
    }
    return labels;
}

/// Mean silhouette over non-noise points; singleton clusters score 0.
/// Undefined (nullopt) with fewer than two clusters.
inline std::optional<double> silhouette(const Eigen::MatrixXd& points,
                                        const std::vector<int>& labels) {
    const int n = static_cast<int>(points.rows());
    int max_label = -1;
    for (int l : labels) max_label = std::max(max_label, l);
    if (max_label < 1) return std::nullopt;  // fewer than two clusters
    const int k = max_label + 1;

    std::vector<std::vector<int>> members(static_cast<std::size_t>(k));
    for (int i = 0; i < n; ++i)
        if (labels[static_cast<std::size_t>(i)] >= 0)
            members[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])].push_back(i);

    double total = 0;
    std::size_t counted = 0;
    for (int i = 0; i < n; ++i) {
        const int li = labels[static_cast<std::size_t>(i)];
        if (li < 0) continue;
        const auto& own = members[static_cast<std::size_t>(li)];
        ++counted;
        if (own.size() <= 1) continue;  // s(i) = 0
        double a = 0;
        for (int j : own)
            if (j != i) a += (points.row(i) - points.row(j)).norm();
        a /= static_cast<double>(own.size() - 1);
        double b = std::numeric_limits<double>::infinity();
        for (int c = 0; c < k; ++c) {
            if (c == li || members[static_cast<std::size_t>(c)].empty()) continue;
            double mean = 0;
            for (int j : members[static_cast<std::size_t>(c)])
                mean += (points.row(i) - points.row(j)).norm();
            mean /= static_cast<double>(members[static_cast<std::size_t>(c)].size());
            b = std::min(b, mean);
        }
        const double denom = std::max(a, b);
        if (denom > 0) total += (b - a) / denom;
    }
    if (counted == 0) return std::nullopt;
    return total / static_cast<double>(counted);
}

struct ClusteringResult {
    Eigen::MatrixXd embedding;
    std::vector<int> labels;
    double eps = 0.0;
    int min_samples = 0;
    std::optional<double> silhouette;
    int n_clusters = 0;
    bool target_missed = false;
};

struct SweepCell {
    double eps;
    int min_samples;
    int n_clusters;
    std::optional<double> silhouette;
};

struct SweepOptions {
    double eps_start = 0.1;
    double eps_stop = 5.0;   // inclusive
    double eps_step = 0.1;
    int min_samples_start = 3;
    int min_samples_stop = 30;  // inclusive
    int target_min_clusters = 5;
    int target_max_clusters = 20;
    unsigned workers = 1;
};

inline int count_clusters(const std::vector<int>& labels) {
    int max_label = -1;
    for (int l : labels) max_label = std::max(max_label, l);
    return max_label + 1;
}

/// Grid sweep selecting the max-silhouette cell among those whose cluster
/// count falls in the target band; when no cell lands in the band the best
/// cell overall is returned with `target_missed` set. Ties prefer smaller
/// (eps, min_samples) so the sweep is reproducible.
inline std::pair<ClusteringResult, std::vector<SweepCell>> dbscan_sweep(
    const Eigen::MatrixXd& points, SweepOptions opts = {}) {
    if (points.rows() < 2) throw std::invalid_argument("dbscan_sweep: need at least 2 points");
    std::vector<std::pair<double, int>> grid;
    const int eps_count =
        static_cast<int>(std::floor((opts.eps_stop - opts.eps_start) / opts.eps_step + 1e-9)) + 1;
    for (int e = 0; e < eps_count; ++e)
        for (int ms = opts.min_samples_start; ms <= opts.min_samples_stop; ++ms)
            grid.emplace_back(opts.eps_start + e * opts.eps_step, ms);

    struct CellOut {
        SweepCell cell;
        std::vector<int> labels;
    };
    std::vector<CellOut> cells(grid.size());
    parallel_for(grid.size(), opts.workers, [&](std::size_t i) {
        const auto [eps, ms] = grid[i];
        auto labels = dbscan(points, eps, ms);
        cells[i].cell = SweepCell{eps, ms, count_clusters(labels), silhouette(points, labels)};
        cells[i].labels = std::move(labels);
    });

    auto better = [](const SweepCell& a, const SweepCell& b) {
        // defined silhouette beats undefined; then higher wins
        if (a.silhouette.has_value() != b.silhouette.has_value())
            return a.silhouette.has_value();
        if (a.silhouette && b.silhouette && *a.silhouette != *b.silhouette)
            return *a.silhouette > *b.silhouette;
        return std::tie(a.eps, a.min_samples) < std::tie(b.eps, b.min_samples);
    };

    const CellOut* best_banded = nullptr;
    const CellOut* best_any = nullptr;
    for (const auto& c : cells) {
        const bool in_band = c.cell.n_clusters >= opts.target_min_clusters &&
                             c.cell.n_clusters <= opts.target_max_clusters;
        if (!best_any || better(c.cell, best_any->cell)) best_any = &c;
        if (in_band && (!best_banded || better(c.cell, best_banded->cell))) best_banded = &c;
    }
    const CellOut* chosen = best_banded ? best_banded : best_any;

    ClusteringResult result;
    result.embedding = points;
    result.labels = chosen->labels;
    result.eps = chosen->cell.eps;
    result.min_samples = chosen->cell.min_samples;
    result.silhouette = chosen->cell.silhouette;
    result.n_clusters = chosen->cell.n_clusters;
    result.target_missed = best_banded == nullptr;

    std::vector<SweepCell> report;
    report.reserve(cells.size());
    for (const auto& c : cells) report.push_back(c.cell);
    return {std::move(result), std::move(report)};
}

}  // namespace tvlnet
