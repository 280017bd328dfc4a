#ifndef NCL_CAUSALITY_GRANGER_HPP
#define NCL_CAUSALITY_GRANGER_HPP

/** @file
 * Bivariate Granger causality by OLS on lagged regressions.
 *
 * Restricted model: y(t) = c + sum_i a_i y(t-i) + e_r
 * Full model:       y(t) = c + sum_i a_i y(t-i) + sum_i b_i x(t-i) + e_f
 *
 * The order p is chosen by AIC of the bivariate VAR over 1..max_order, all
 * orders compared on the common sample t = max_order..n-1. The selected
 * order is then refitted on t = p..n-1 and tested with
 *
 *   F = ((RSS_r - RSS_f) / p) / (RSS_f / (T - 2p - 1)),  T = n - p.
 */

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>

#include <Eigen/Dense>
#include <boost/math/distributions/fisher_f.hpp>

#include "ncl/error.hpp"

namespace ncl {

struct gc_config {
    std::size_t max_order = 30;
    double alpha = 0.05;
};

inline void validate(const gc_config& c) {
    detail::require(c.max_order >= 1, "gc: max_order must be >= 1");
    detail::require(c.alpha > 0.0 && c.alpha < 1.0, "gc: alpha must lie in (0,1)");
}

struct gc_result {
    std::size_t order = 0;
    std::size_t samples = 0; // effective sample count T
    double rss_restricted = 0.0;
    double rss_full = 0.0;
    double f_statistic = 0.0;
    /// ln(RSS_r / RSS_f)
    double log_ratio = 0.0;
    double p_value = 1.0;
    bool significant = false;
};

/// Largest order whose full model still leaves a positive residual dof.
inline std::size_t max_feasible_order(std::size_t n) {
    // Need T - (2p + 1) >= 1 with T = n - p, i.e. n >= 3p + 2.
    return n >= 5 ? (n - 2) / 3 : 0;
}

namespace detail {

/// Columns [1, y(t-1), x(t-1), y(t-2), x(t-2), ...] for rows t = first..n-1,
/// so the full model of order p is the leading 2p+1 columns.
inline Eigen::MatrixXd lag_design(std::span<const double> x, std::span<const double> y, std::size_t lags,
                                  std::size_t first) {
    const auto rows = static_cast<Eigen::Index>(y.size() - first);
    Eigen::MatrixXd X(rows, static_cast<Eigen::Index>(2 * lags + 1));
    for (Eigen::Index r = 0; r < rows; ++r) {
        const std::size_t t = first + static_cast<std::size_t>(r);
        X(r, 0) = 1.0;
        for (std::size_t i = 1; i <= lags; ++i) {
            X(r, static_cast<Eigen::Index>(2 * i - 1)) = y[t - i];
            X(r, static_cast<Eigen::Index>(2 * i)) = x[t - i];
        }
    }
    return X;
}

inline Eigen::VectorXd target(std::span<const double> y, std::size_t first) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(y.size() - first));
    for (Eigen::Index r = 0; r < v.size(); ++r) v(r) = y[first + static_cast<std::size_t>(r)];
    return v;
}

/// Residual sum of squares of y on X; throws when X is column-rank deficient.
inline double ols_rss(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    qr.setThreshold(1e-10);
    if (qr.rank() < X.cols())
        throw rank_deficient_error("granger: regression is rank deficient (rank " + std::to_string(qr.rank()) +
                                   " of " + std::to_string(X.cols()) + " columns)");
    const Eigen::VectorXd beta = qr.solve(y);
    return (y - X * beta).squaredNorm();
}

inline Eigen::MatrixXd restricted_columns(const Eigen::MatrixXd& full, std::size_t p) {
    Eigen::MatrixXd R(full.rows(), static_cast<Eigen::Index>(p + 1));
    R.col(0) = full.col(0);
    for (std::size_t i = 1; i <= p; ++i) R.col(static_cast<Eigen::Index>(i)) = full.col(static_cast<Eigen::Index>(2 * i - 1));
    return R;
}

} // namespace detail

/**
 * AIC-selected order of the bivariate VAR on (y, x), compared on a common
 * sample. Both equations enter through the log-determinant of the residual
 * covariance, so the choice does not favour the x -> y direction.
 */
inline std::size_t select_order_aic(std::span<const double> x, std::span<const double> y, std::size_t max_order) {
    const auto X = detail::lag_design(x, y, max_order, max_order);
    Eigen::MatrixXd Y(static_cast<Eigen::Index>(y.size() - max_order), 2);
    Y.col(0) = detail::target(y, max_order);
    Y.col(1) = detail::target(x, max_order);
    const double T = static_cast<double>(Y.rows());
    std::size_t best = 0;
    double best_aic = std::numeric_limits<double>::infinity();
    for (std::size_t p = 1; p <= max_order; ++p) {
        const auto k = static_cast<Eigen::Index>(2 * p + 1);
        const Eigen::MatrixXd Xk = X.leftCols(k);
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Xk);
        qr.setThreshold(1e-10);
        if (qr.rank() < k)
            throw rank_deficient_error("granger: order selection regression is rank deficient at order " +
                                       std::to_string(p));
        const Eigen::MatrixXd resid = Y - Xk * qr.solve(Y);
        // Exact fit of y; higher orders only add collinear lags.
        if (resid.col(0).squaredNorm() <= 1e-24 * Y.col(0).squaredNorm()) return p;
        const Eigen::Matrix2d sigma = resid.transpose() * resid / T;
        const double det = sigma.determinant();
        if (!(det > 0.0)) return p;
        const double aic = T * std::log(det) + 2.0 * 2.0 * static_cast<double>(k);
        if (aic < best_aic) {
            best_aic = aic;
            best = p;
        }
    }
    if (best == 0) throw error("granger: order selection failed");
    return best;
}

/// Restricted/full fits and the F test at a fixed order.
inline gc_result granger_at_order(std::span<const double> x, std::span<const double> y, std::size_t p,
                                  double alpha = 0.05) {
    if (x.size() != y.size()) throw dimension_error("granger: series differ in length");
    if (p < 1 || p > max_feasible_order(y.size()))
        throw config_error("granger: order " + std::to_string(p) + " infeasible for length " + std::to_string(y.size()));
    const auto X = detail::lag_design(x, y, p, p);
    const auto Y = detail::target(y, p);
    gc_result r;
    r.order = p;
    r.samples = static_cast<std::size_t>(Y.size());
    r.rss_full = detail::ols_rss(X, Y);
    r.rss_restricted = detail::ols_rss(detail::restricted_columns(X, p), Y);
    const double df1 = static_cast<double>(p);
    const double df2 = static_cast<double>(r.samples) - 2.0 * df1 - 1.0;
    if (r.rss_full <= 1e-24 * Y.squaredNorm()) {
        // Exact prediction from the lags of x: the F statistic is unbounded.
        r.f_statistic = std::numeric_limits<double>::infinity();
        r.log_ratio = std::numeric_limits<double>::infinity();
        r.p_value = 0.0;
    } else {
        r.f_statistic = ((r.rss_restricted - r.rss_full) / df1) / (r.rss_full / df2);
        r.log_ratio = std::log(r.rss_restricted / r.rss_full);
        const boost::math::fisher_f dist(df1, df2);
        r.p_value = r.f_statistic > 0.0 ? boost::math::cdf(boost::math::complement(dist, r.f_statistic)) : 1.0;
    }
    r.significant = r.p_value < alpha;
    return r;
}

/// Granger causality in the direction x -> y with AIC order selection.
inline gc_result granger(std::span<const double> x, std::span<const double> y, const gc_config& cfg) {
    validate(cfg);
    if (x.size() != y.size()) throw dimension_error("granger: series differ in length");
    if (cfg.max_order > max_feasible_order(y.size()))
        throw config_error("granger: series of length " + std::to_string(y.size()) + " too short for max order " +
                           std::to_string(cfg.max_order));
    const std::size_t p = select_order_aic(x, y, cfg.max_order);
    return granger_at_order(x, y, p, cfg.alpha);
}

} // namespace ncl

#endif // NCL_CAUSALITY_GRANGER_HPP
