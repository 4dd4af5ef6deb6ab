#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <optional>
#include <string>
#include <vector>

#include "tvlnet/csv.hpp"
#include "tvlnet/util.hpp"

namespace tvlnet {

/// VAR(p): y_t = c + A_1 y_{t-1} + ... + A_p y_{t-p} + e_t, estimated by
/// per-equation OLS.
struct VarModel {
    std::vector<std::string> names;       // m variable names
    int lags = 0;
    Eigen::VectorXd intercept;            // m
    std::vector<Eigen::MatrixXd> coeffs;  // p matrices, each m x m
    Eigen::MatrixXd sigma;                // residual covariance, m x m
    double spectral_radius = 0.0;         // of the companion matrix
    bool stable = false;

    int dim() const { return static_cast<int>(names.size()); }
};

namespace detail {

inline std::string lag_name(const std::vector<std::string>& names, int col) {
    if (col == 0) return "const";
    const int m = static_cast<int>(names.size());
    const int lag = (col - 1) / m + 1;
    const int var = (col - 1) % m;
    return "L" + std::to_string(lag) + "." + names[static_cast<std::size_t>(var)];
}

}  // namespace detail

/// Fits by OLS on the stacked regressor matrix [1, y_{t-1}, ..., y_{t-p}].
/// The residual covariance divides by T_eff - m*p - 1 (observations minus
/// parameters per equation). A rank-deficient regressor matrix raises an
/// error naming the dependent columns.
inline VarModel fit_var(const Eigen::MatrixXd& series, const std::vector<std::string>& names,
                        int lags) {
    const int T = static_cast<int>(series.rows());
    const int m = static_cast<int>(series.cols());
    if (m == 0) throw std::invalid_argument("fit_var: no series");
    if (static_cast<int>(names.size()) != m)
        throw std::invalid_argument("fit_var: names/series mismatch");
    if (lags < 1) throw std::invalid_argument("fit_var: lags must be >= 1");
    const int k = m * lags + 1;  // parameters per equation
    const int t_eff = T - lags;
    if (t_eff <= k)
        throw std::invalid_argument("fit_var: series too short for " + std::to_string(lags) +
                                    " lags (need length > m*p + 1 after lagging)");

    Eigen::MatrixXd z(t_eff, k);
    Eigen::MatrixXd y(t_eff, m);
    for (int t = 0; t < t_eff; ++t) {
        z(t, 0) = 1.0;
        for (int l = 1; l <= lags; ++l)
            z.block(t, 1 + (l - 1) * m, 1, m) = series.row(lags + t - l);
        y.row(t) = series.row(lags + t);
    }

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(z);
    qr.setThreshold(1e-10);
    if (qr.rank() < k) {
        const auto perm = qr.colsPermutation().indices();
        std::string cols;
        for (int i = qr.rank(); i < k; ++i) {
            if (!cols.empty()) cols += ", ";
            cols += detail::lag_name(names, perm(i));
        }
        throw std::runtime_error("fit_var: singular regressor matrix; dependent columns: " +
                                 cols);
    }
    const Eigen::MatrixXd beta = qr.solve(y);  // k x m
    const Eigen::MatrixXd resid = y - z * beta;

    VarModel model;
    model.names = names;
    model.lags = lags;
    model.intercept = beta.row(0).transpose();
    model.coeffs.reserve(static_cast<std::size_t>(lags));
    for (int l = 0; l < lags; ++l)
        model.coeffs.push_back(beta.block(1 + l * m, 0, m, m).transpose());
    model.sigma = resid.transpose() * resid / static_cast<double>(t_eff - k);

    // companion-matrix spectral radius
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(m * lags, m * lags);
    for (int l = 0; l < lags; ++l)
        companion.block(0, l * m, m, m) = model.coeffs[static_cast<std::size_t>(l)];
    if (lags > 1)
        companion.block(m, 0, m * (lags - 1), m * (lags - 1)) =
            Eigen::MatrixXd::Identity(m * (lags - 1), m * (lags - 1));
    Eigen::EigenSolver<Eigen::MatrixXd> es(companion, false);
    model.spectral_radius = es.eigenvalues().cwiseAbs().maxCoeff();
    model.stable = model.spectral_radius < 1.0;
    return model;
}

/// Orthogonalized impulse responses out to `horizon` periods (h = 0 is the
/// impact response, the Cholesky column itself). responses[h](i, j) is the
/// reaction of variable i to a one-standard-deviation shock in variable j.
/// Requires a positive-definite residual covariance.
inline std::vector<Eigen::MatrixXd> irf(const VarModel& model, int horizon) {
    if (horizon < 1) throw std::invalid_argument("irf: horizon must be >= 1");
    const int m = model.dim();
    Eigen::LLT<Eigen::MatrixXd> llt(model.sigma);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("irf: residual covariance is not positive definite");
    const Eigen::MatrixXd chol = llt.matrixL();

    // MA coefficients Phi_h via the recursion Phi_h = sum A_i Phi_{h-i}
    std::vector<Eigen::MatrixXd> phi;
    phi.reserve(static_cast<std::size_t>(horizon));
    phi.push_back(Eigen::MatrixXd::Identity(m, m));
    for (int h = 1; h < horizon; ++h) {
        Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(m, m);
        for (int i = 1; i <= std::min(h, model.lags); ++i)
            acc += model.coeffs[static_cast<std::size_t>(i - 1)] *
                   phi[static_cast<std::size_t>(h - i)];
        phi.push_back(std::move(acc));
    }
    std::vector<Eigen::MatrixXd> responses;
    responses.reserve(phi.size());
    for (const auto& p : phi) responses.push_back(p * chol);
    return responses;
}

inline std::string irf_csv(const VarModel& model, const std::vector<Eigen::MatrixXd>& responses) {
    std::string out = "horizon,shock,response,value\n";
    for (std::size_t h = 0; h < responses.size(); ++h)
        for (int j = 0; j < model.dim(); ++j)
            for (int i = 0; i < model.dim(); ++i) {
                char buf[32];
                std::snprintf(buf, sizeof(buf), "%.12g", responses[h](i, j));
                out += csv_row({std::to_string(h), model.names[static_cast<std::size_t>(j)],
                                model.names[static_cast<std::size_t>(i)], buf});
            }
    return out;
}

/// Simulates a VAR path for tests and fixtures.
inline Eigen::MatrixXd simulate_var(const VarModel& model, int T, std::uint64_t seed,
                                    double noise_scale = 1.0) {
    const int m = model.dim();
    Rng rng(seed);
    Eigen::MatrixXd y = Eigen::MatrixXd::Zero(T, m);
    Eigen::LLT<Eigen::MatrixXd> llt(model.sigma);
    const Eigen::MatrixXd chol = llt.info() == Eigen::Success
                                     ? Eigen::MatrixXd(llt.matrixL())
                                     : Eigen::MatrixXd::Identity(m, m);
    for (int t = 0; t < T; ++t) {
        Eigen::VectorXd eps(m);
        for (int i = 0; i < m; ++i) eps(i) = rng.normal();
        Eigen::VectorXd v = model.intercept + noise_scale * (chol * eps);
        for (int l = 1; l <= model.lags && t - l >= 0; ++l)
            v += model.coeffs[static_cast<std::size_t>(l - 1)] * y.row(t - l).transpose();
        y.row(t) = v.transpose();
    }
    return y;
}

}  // namespace tvlnet
