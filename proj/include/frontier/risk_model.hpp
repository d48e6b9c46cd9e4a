#pragma once

#include <Eigen/Core>
#include <cstddef>

#include "frontier/market_data.hpp"

namespace frontier {

/**
 * Low-rank-plus-diagonal covariance estimate F diag(lambda) F' + D.
 *
 * Evaluating h' Sigma h through the factor structure costs O(m k) for an
 * m-dimensional holding vector instead of O(m^2).
 */
struct FactorRiskModel {
    Eigen::MatrixXd loadings;          ///< m x k, columns are eigenvectors
    Eigen::VectorXd factor_variances;  ///< k eigenvalues, descending, non-negative
    Eigen::VectorXd idiosyncratic;     ///< m diagonal entries of D

    std::size_t dimension() const { return static_cast<std::size_t>(loadings.rows()); }
    std::size_t factors() const { return static_cast<std::size_t>(loadings.cols()); }

    /// Dense reconstruction, for diagnostics and tests.
    Eigen::MatrixXd covariance() const;
};

inline constexpr std::size_t kCovarianceWindow = 500;
inline constexpr std::size_t kDefaultFactors = 15;

/// min(15, n-1) clamped to at least one factor.
std::size_t default_factor_count(std::size_t num_risky);

/**
 * Population covariance of risky simple returns over panel dates
 * t-window .. t-1, embedded in an (n+1)x(n+1) matrix with a zero cash row and
 * column.
 */
Eigen::MatrixXd trailing_covariance(const ReturnsPanel& returns, std::size_t t,
                                    std::size_t window = kCovarianceWindow);

/// Eigen-factor model of a symmetric PSD matrix keeping the top k factors.
FactorRiskModel fit_factor_model(const Eigen::MatrixXd& cov, std::size_t k);

/// Appends a zero-risk cash slot to a model fitted on risky assets.
FactorRiskModel with_cash_slot(const FactorRiskModel& risky);

/**
 * Factor model for period t: decomposes the risky block of the trailing
 * covariance and appends cash as a zero row/column.
 */
FactorRiskModel estimate_risk_model(const ReturnsPanel& returns, std::size_t t, std::size_t k,
                                    std::size_t window = kCovarianceWindow);

/// h' Sigma h evaluated through the factor structure.
double quadratic_risk(const FactorRiskModel& model, const Eigen::VectorXd& holdings);

/// 2 Sigma h, via the factor structure.
Eigen::VectorXd quadratic_risk_gradient(const FactorRiskModel& model, const Eigen::VectorXd& holdings);

/// Sigma h, via the factor structure.
Eigen::VectorXd covariance_times(const FactorRiskModel& model, const Eigen::VectorXd& holdings);

}  // namespace frontier
