#include "frontier/costs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <tuple>
#include <vector>

#include "frontier/error.hpp"

namespace frontier {

namespace {

constexpr double kSimplexTol = 1e-9;

void check_trade_size(const Eigen::VectorXd& z, std::size_t num_risky) {
    if (static_cast<std::size_t>(z.size()) != num_risky + 1) {
        throw DimensionError("trade vector has " + std::to_string(z.size()) + " entries, expected " +
                             std::to_string(num_risky + 1));
    }
}

// Mean with a second-pass correction, then population standard deviation.
std::pair<double, double> mean_and_std(std::span<const double> x) {
    const double t = static_cast<double>(x.size());
    double sum = 0.0;
    for (double v : x) sum += v;
    double mean = sum / t;
    double correction = 0.0;
    for (double v : x) correction += v - mean;
    mean += correction / t;
    double ss = 0.0;
    double max_abs = 0.0;
    for (double v : x) {
        ss += (v - mean) * (v - mean);
        max_abs = std::max(max_abs, std::abs(v));
    }
    double sd = std::sqrt(ss / t);
    // residual rounding noise of a constant series is not risk
    if (sd <= 64.0 * std::numeric_limits<double>::epsilon() * max_abs) sd = 0.0;
    return {mean, sd};
}

}  // namespace

void CostParams::validate() const {
    if (!(a >= 0.0)) throw ConfigError("cost parameter a must be >= 0");
    if (!(b >= 0.0)) throw ConfigError("cost parameter b must be >= 0");
    if (!std::isfinite(c)) throw ConfigError("cost parameter c must be finite");
}

double transaction_cost(const Eigen::VectorXd& z, const Eigen::VectorXd& sigma,
                        const Eigen::VectorXd& volume, double value, const CostParams& params) {
    return CostModel(CostInputs{sigma, volume, value}, params).cost(z);
}

CostModel::CostModel(const CostInputs& in, const CostParams& params) : params_(params) {
    params_.validate();
    if (in.sigma.size() != in.volume.size()) throw DimensionError("sigma and volume sizes differ");
    if (!(in.value > 0.0)) throw DataError("non-positive portfolio value");
    impact_.resize(in.sigma.size());
    for (Eigen::Index i = 0; i < in.sigma.size(); ++i) {
        if (in.volume(i) > 0.0) {
            impact_(i) = params_.b * in.sigma(i) / std::sqrt(in.volume(i) / in.value);
        } else {
            impact_(i) = std::numeric_limits<double>::quiet_NaN();  // only legal with z_i = 0
        }
    }
}

double CostModel::cost(const Eigen::VectorXd& z) const {
    check_trade_size(z, num_risky());
    double total = 0.0;
    for (Eigen::Index i = 0; i < impact_.size(); ++i) {
        const double zi = z(i);
        if (zi == 0.0) continue;
        if (std::isnan(impact_(i))) {
            throw DataError("zero volume with nonzero trade on asset " + std::to_string(i));
        }
        const double m = std::abs(zi);
        total += params_.a * m + impact_(i) * m * std::sqrt(m) + params_.c * zi;
    }
    return total;
}

double CostModel::smooth_cost(const Eigen::VectorXd& z) const {
    check_trade_size(z, num_risky());
    double total = 0.0;
    for (Eigen::Index i = 0; i < impact_.size(); ++i) {
        const double zi = z(i);
        if (zi == 0.0) continue;
        if (std::isnan(impact_(i))) {
            throw DataError("zero volume with nonzero trade on asset " + std::to_string(i));
        }
        const double m = std::abs(zi);
        total += impact_(i) * m * std::sqrt(m) + params_.c * zi;
    }
    return total;
}

Eigen::VectorXd CostModel::smooth_gradient(const Eigen::VectorXd& z) const {
    check_trade_size(z, num_risky());
    Eigen::VectorXd g = Eigen::VectorXd::Zero(z.size());
    for (Eigen::Index i = 0; i < impact_.size(); ++i) {
        const double zi = z(i);
        if (zi == 0.0) {
            g(i) = params_.c;
            continue;
        }
        if (std::isnan(impact_(i))) {
            throw DataError("zero volume with nonzero trade on asset " + std::to_string(i));
        }
        g(i) = 1.5 * impact_(i) * std::copysign(std::sqrt(std::abs(zi)), zi) + params_.c;
    }
    return g;
}

double CostModel::smoothed_cost(const Eigen::VectorXd& z, double delta) const {
    check_trade_size(z, num_risky());
    double total = 0.0;
    for (Eigen::Index i = 0; i < impact_.size(); ++i) {
        const double zi = z(i);
        if (std::isnan(impact_(i))) {
            if (zi != 0.0) throw DataError("zero volume with nonzero trade on asset " + std::to_string(i));
            continue;
        }
        total += params_.a * std::abs(zi) + impact_(i) * std::pow(zi * zi + delta, 0.75) +
                 params_.c * zi;
    }
    return total;
}

Eigen::VectorXd CostModel::smoothed_gradient(const Eigen::VectorXd& z, double delta) const {
    check_trade_size(z, num_risky());
    Eigen::VectorXd g = Eigen::VectorXd::Zero(z.size());
    for (Eigen::Index i = 0; i < impact_.size(); ++i) {
        const double zi = z(i);
        if (std::isnan(impact_(i))) {
            if (zi != 0.0) throw DataError("zero volume with nonzero trade on asset " + std::to_string(i));
            continue;
        }
        const double sign = zi > 0.0 ? 1.0 : (zi < 0.0 ? -1.0 : 0.0);
        g(i) = params_.a * sign + 1.5 * impact_(i) * zi * std::pow(zi * zi + delta, -0.25) + params_.c;
    }
    return g;
}

PortfolioState PortfolioState::all_cash(std::size_t num_risky, double value) {
    PortfolioState s;
    s.weights = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(num_risky + 1));
    s.weights(static_cast<Eigen::Index>(num_risky)) = 1.0;
    s.trade = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(num_risky + 1));
    s.value = value;
    return s;
}

void PortfolioState::validate() const {
    if (trade.size() != weights.size()) throw DimensionError("trade and weight sizes differ");
    if (std::abs(weights.sum() - 1.0) > kSimplexTol) throw DataError("weights must sum to 1");
    if ((weights.array() < -kSimplexTol).any()) throw DataError("weights must be non-negative");
    if (std::abs(trade.sum()) > kSimplexTol) throw DataError("trades must sum to 0");
    if (!(value > 0.0)) throw DataError("non-positive portfolio value");
}

double realized_return(const Eigen::VectorXd& r, const PortfolioState& state, double cost) {
    if (r.size() != state.weights.size() || r.size() != state.trade.size()) {
        throw DimensionError("return, weight and trade vectors must have equal length");
    }
    return r.dot(state.weights) + r.dot(state.trade) - cost;
}

PerformanceSummary summarize(std::span<const double> returns, std::span<const double> risk_free) {
    if (returns.size() != risk_free.size()) throw DimensionError("return and risk-free lengths differ");
    if (returns.size() < 2) throw DataError("summarize needs at least two periods");

    std::vector<double> excess(returns.size());
    for (std::size_t i = 0; i < returns.size(); ++i) excess[i] = returns[i] - risk_free[i];

    PerformanceSummary s;
    std::tie(s.mean_return, s.volatility) = mean_and_std(returns);
    std::tie(s.excess_return, s.excess_risk) = mean_and_std(excess);
    if (s.excess_risk > 0.0) s.sharpe = s.excess_return / s.excess_risk;
    return s;
}

}  // namespace frontier
