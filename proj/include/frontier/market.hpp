#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <memory>
#include <mutex>
#include <vector>

#include "frontier/costs.hpp"
#include "frontier/market_data.hpp"
#include "frontier/risk_model.hpp"

namespace frontier {

struct MarketOptions {
    std::size_t covariance_window = kCovarianceWindow;
    std::size_t factors = 0;  ///< 0 selects default_factor_count(n)
};

/**
 * Immutable per-date view of a price panel shared by strategies, the
 * backtest loop, and training.
 *
 * Period t (panel index t >= 1) is the holding interval from close t-1 to
 * close t. Everything returned for period t other than the realized_*
 * quantities and period_return is computed from panel dates <= t-1.
 */
class MarketContext {
public:
    explicit MarketContext(PricePanel panel, MarketOptions options = {});

    const PricePanel& panel() const { return panel_; }
    const ReturnsPanel& returns() const { return returns_; }
    const MarketOptions& options() const { return options_; }
    std::size_t num_risky() const { return panel_.num_risky(); }
    std::size_t num_slots() const { return panel_.num_slots(); }
    std::size_t num_dates() const { return panel_.num_dates(); }

    /// r_t (n+1), earned over period t.
    Eigen::VectorXd period_return(std::size_t t) const { return returns_.simple_at(t); }
    Eigen::VectorXd period_log_return(std::size_t t) const { return returns_.log_at(t); }
    double risk_free(std::size_t t) const { return period_return(t)(static_cast<Eigen::Index>(num_risky())); }

    /// Intraday volatility proxy and traded volume on day t.
    Eigen::VectorXd realized_sigma(std::size_t t) const;
    Eigen::VectorXd realized_volume(std::size_t t) const;

    /// Trailing 10-day estimates for period t.
    Eigen::VectorXd volume_estimate(std::size_t t) const;
    Eigen::VectorXd volatility_estimate(std::size_t t) const;

    /// Full per-date series of the estimates (rows before the first valid date are NaN).
    const Eigen::MatrixXd& volume_estimates() const { return volume_hat_; }
    const Eigen::MatrixXd& volatility_estimates() const { return sigma_hat_; }

    CostInputs realized_costs(std::size_t t, double value) const;
    CostInputs estimated_costs(std::size_t t, double value) const;

    /// Factor risk model for period t; computed once and cached.
    std::shared_ptr<const FactorRiskModel> risk_model(std::size_t t) const;

    /// Smallest period index with a full covariance window.
    std::size_t first_risk_period() const { return options_.covariance_window + 1; }
    std::size_t factor_count() const;

private:
    PricePanel panel_;
    MarketOptions options_;
    ReturnsPanel returns_;
    Eigen::MatrixXd sigma_;
    Eigen::MatrixXd volume_hat_;
    Eigen::MatrixXd sigma_hat_;
    mutable std::mutex risk_mutex_;
    mutable std::vector<std::shared_ptr<const FactorRiskModel>> risk_cache_;
};

/**
 * Simulated return forecasts: alpha * (r_t + eps) for risky assets with eps
 * drawn per (asset, date) from the seed, and the known risk-free rate for
 * cash. Deterministic in (seed, config).
 */
class ForecastChannel {
public:
    ForecastChannel(const MarketContext& market, const ForecastConfig& config, std::uint64_t seed);

    const ForecastConfig& config() const { return config_; }
    /// Forecast of r_t (n+1).
    Eigen::VectorXd forecast(std::size_t t) const;
    /// Forecasts for periods t .. t+count-1, truncated at the end of the panel.
    std::vector<Eigen::VectorXd> forecasts(std::size_t t, std::size_t count) const;

private:
    ForecastConfig config_;
    Eigen::MatrixXd table_;  // row t-1 holds the forecast for period t
};

}  // namespace frontier
