#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "frontier/costs.hpp"
#include "frontier/date.hpp"
#include "frontier/market.hpp"
#include "frontier/optimizer.hpp"

namespace frontier {

/// What a strategy may look at when choosing the holdings for period t.
struct DecisionContext {
    std::size_t period;
    const MarketContext& market;
    const PortfolioState& state;
};

/**
 * A rebalancing rule. decide() returns the post-trade holdings x_t = w_t + z_t
 * for period t, using only market data up to date t-1 and, where the strategy
 * is built on one, the forecast channel.
 */
class Strategy {
public:
    virtual ~Strategy() = default;
    virtual std::string name() const = 0;
    virtual Eigen::VectorXd decide(const DecisionContext& ctx) = 0;
    /// Smallest period index the strategy can decide for.
    virtual std::size_t first_valid_period(const MarketContext& market) const = 0;
};

struct BacktestResult {
    std::vector<std::string> assets;  ///< n risky names followed by the cash name
    std::vector<Date> dates;
    std::vector<Eigen::VectorXd> weights;  ///< post-trade holdings per period
    std::vector<Eigen::VectorXd> trades;
    std::vector<double> costs;
    std::vector<double> returns;
    std::vector<double> risk_free;
    std::vector<double> values;  ///< portfolio value at the end of each period
    PerformanceSummary summary;

    std::size_t num_periods() const { return dates.size(); }
};

/// Periods whose dates fall in `range`: t >= 1 with dates[t] in [first, last).
std::pair<std::size_t, std::size_t> period_span(const MarketContext& market, const DateRange& range);

/**
 * Daily simulation over the periods in `range`. Trades execute at the close,
 * realized costs use the day's volatility proxy and volume, and costs are
 * taken out of the holdings pro rata before they drift into the next period.
 */
BacktestResult run_backtest(Strategy& strategy, const MarketContext& market, const DateRange& range,
                            const CostParams& params, const std::optional<PortfolioState>& initial = std::nullopt);

/// Writes `date,asset,weight,trade,cost,return`, one row per (period, asset).
void write_backtest_csv(const BacktestResult& result, const std::filesystem::path& path);

/// Equal weight over risky assets, nothing in cash, restored every day.
class EqualWeightStrategy : public Strategy {
public:
    std::string name() const override { return "ew"; }
    Eigen::VectorXd decide(const DecisionContext& ctx) override;
    std::size_t first_valid_period(const MarketContext&) const override { return 1; }
};

/// Everything in cash.
class CashStrategy : public Strategy {
public:
    std::string name() const override { return "cash"; }
    Eigen::VectorXd decide(const DecisionContext& ctx) override;
    std::size_t first_valid_period(const MarketContext&) const override { return 1; }
};

/// Moves into `target` once, then never trades again.
class BuyAndHoldStrategy : public Strategy {
public:
    explicit BuyAndHoldStrategy(Eigen::VectorXd target) : target_(std::move(target)) {}
    std::string name() const override { return "buy-and-hold"; }
    Eigen::VectorXd decide(const DecisionContext& ctx) override;
    std::size_t first_valid_period(const MarketContext&) const override { return 1; }

private:
    Eigen::VectorXd target_;
    bool invested_ = false;
};

struct ConvexStrategyOptions {
    InvestorPreferences prefs;
    CostParams costs;
    std::size_t horizon = 1;  ///< 1 for the single-period program
    SolverOptions solver;
};

/// Solves the single- or multi-period program every day and executes the first trade.
class ConvexStrategy : public Strategy {
public:
    ConvexStrategy(std::shared_ptr<const ForecastChannel> forecasts, ConvexStrategyOptions options);

    std::string name() const override { return options_.horizon == 1 ? "spo" : "mpo"; }
    Eigen::VectorXd decide(const DecisionContext& ctx) override;
    std::size_t first_valid_period(const MarketContext& market) const override;

    /// Solver diagnostics of the most recent decision.
    const TradePlan& last_plan() const { return last_plan_; }

private:
    std::shared_ptr<const ForecastChannel> forecasts_;
    ConvexStrategyOptions options_;
    TradePlan last_plan_;
};

}  // namespace frontier
