#include "frontier/market.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "frontier/error.hpp"

namespace frontier {

namespace {

Eigen::MatrixXd rolling_table(const Eigen::MatrixXd& series) {
    Eigen::MatrixXd out = Eigen::MatrixXd::Constant(series.rows(), series.cols(),
                                                    std::numeric_limits<double>::quiet_NaN());
    for (Eigen::Index t = static_cast<Eigen::Index>(kRollingWindow); t < series.rows(); ++t) {
        out.row(t) = trailing_mean(series, static_cast<std::size_t>(t)).transpose();
    }
    return out;
}

}  // namespace

MarketContext::MarketContext(PricePanel panel, MarketOptions options)
    : panel_(std::move(panel)), options_(options) {
    panel_.validate();
    returns_ = compute_returns(panel_);
    sigma_ = volatility_proxy(panel_);
    volume_hat_ = rolling_table(panel_.volume);
    sigma_hat_ = rolling_table(sigma_);
    if (options_.covariance_window < 2) throw ConfigError("covariance window must be at least 2");
    if (options_.factors > panel_.num_risky()) throw ConfigError("factor count exceeds the number of assets");
    risk_cache_.resize(panel_.num_dates());
}

std::size_t MarketContext::factor_count() const {
    return options_.factors == 0 ? default_factor_count(num_risky()) : options_.factors;
}

Eigen::VectorXd MarketContext::realized_sigma(std::size_t t) const {
    if (t >= num_dates()) throw HistoryError("date index past end of panel");
    return sigma_.row(static_cast<Eigen::Index>(t)).transpose();
}

Eigen::VectorXd MarketContext::realized_volume(std::size_t t) const {
    if (t >= num_dates()) throw HistoryError("date index past end of panel");
    return panel_.volume.row(static_cast<Eigen::Index>(t)).transpose();
}

Eigen::VectorXd MarketContext::volume_estimate(std::size_t t) const {
    if (t >= num_dates()) throw HistoryError("date index past end of panel");
    if (t < kRollingWindow) return rolling_volume_estimate(panel_, t);  // throws
    return volume_hat_.row(static_cast<Eigen::Index>(t)).transpose();
}

Eigen::VectorXd MarketContext::volatility_estimate(std::size_t t) const {
    if (t >= num_dates()) throw HistoryError("date index past end of panel");
    if (t < kRollingWindow) return rolling_volatility_estimate(sigma_, t);  // throws
    return sigma_hat_.row(static_cast<Eigen::Index>(t)).transpose();
}

CostInputs MarketContext::realized_costs(std::size_t t, double value) const {
    return CostInputs{realized_sigma(t), realized_volume(t), value};
}

CostInputs MarketContext::estimated_costs(std::size_t t, double value) const {
    return CostInputs{volatility_estimate(t), volume_estimate(t), value};
}

std::shared_ptr<const FactorRiskModel> MarketContext::risk_model(std::size_t t) const {
    if (t >= num_dates()) throw HistoryError("date index past end of panel");
    {
        std::lock_guard lock(risk_mutex_);
        if (risk_cache_[t]) return risk_cache_[t];
    }
    auto model = std::make_shared<const FactorRiskModel>(
        estimate_risk_model(returns_, t, factor_count(), options_.covariance_window));
    std::lock_guard lock(risk_mutex_);
    if (!risk_cache_[t]) risk_cache_[t] = std::move(model);
    return risk_cache_[t];
}

ForecastChannel::ForecastChannel(const MarketContext& market, const ForecastConfig& config,
                                 std::uint64_t seed)
    : config_(config) {
    config_.validate();
    const ForecastNoise noise(seed, config_.noise_variance);
    const double alpha = config_.alpha();
    const auto& r = market.returns().simple;
    const auto n = static_cast<Eigen::Index>(market.num_risky());
    table_.resize(r.rows(), r.cols());
    for (Eigen::Index row = 0; row < r.rows(); ++row) {
        const auto t = static_cast<std::size_t>(row + 1);
        for (Eigen::Index i = 0; i < n; ++i) {
            table_(row, i) = alpha * (r(row, i) + noise.draw(static_cast<std::size_t>(i), t));
        }
        table_(row, n) = r(row, n);
    }
}

Eigen::VectorXd ForecastChannel::forecast(std::size_t t) const {
    if (t == 0 || t > static_cast<std::size_t>(table_.rows())) {
        throw HistoryError("no forecast for period " + std::to_string(t));
    }
    return table_.row(static_cast<Eigen::Index>(t - 1)).transpose();
}

std::vector<Eigen::VectorXd> ForecastChannel::forecasts(std::size_t t, std::size_t count) const {
    std::vector<Eigen::VectorXd> out;
    for (std::size_t k = 0; k < count && t + k <= static_cast<std::size_t>(table_.rows()); ++k) {
        out.push_back(forecast(t + k));
    }
    if (out.empty()) throw HistoryError("no forecast for period " + std::to_string(t));
    return out;
}

}  // namespace frontier
