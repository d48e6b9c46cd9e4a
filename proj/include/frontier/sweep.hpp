#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "frontier/agent.hpp"
#include "frontier/backtest.hpp"
#include "frontier/costs.hpp"
#include "frontier/date.hpp"
#include "frontier/market.hpp"
#include "frontier/optimizer.hpp"
#include "frontier/policy.hpp"

namespace frontier {

/// Cross product of risk and trading aversion values, risk-major.
struct SweepGrid {
    std::vector<double> risk_values;
    std::vector<double> trade_values;

    /// 21 x 24 = 504 pairs.
    static SweepGrid full();
    /// 6 x 2 pairs spanning the full risk range.
    static SweepGrid small();

    std::size_t size() const { return risk_values.size() * trade_values.size(); }
    std::vector<InvestorPreferences> pairs() const;
    void validate() const;
};

struct StrategyFamily {
    enum class Kind { EqualWeight, Spo, Mpo, Frontier };
    Kind kind = Kind::Spo;
    PolicyVariant variant = PolicyVariant::LogReturns;

    /// "ew", "spo", "mpo", "frontier-log-returns", ...
    std::string label() const;
    std::string family() const;
    /// The policy variant for FRONTIER, empty otherwise.
    std::string variant_name() const;
    bool stochastic() const { return kind != Kind::EqualWeight; }

    static StrategyFamily parse(std::string_view text);
};

struct FrontierPoint {
    std::string family;
    std::string variant;
    InvestorPreferences prefs;
    std::size_t seed = 0;
    double excess_risk = 0.0;
    double excess_return = 0.0;
    std::optional<double> sharpe;
};

/// Everything a sweep task needs besides the family and the grid.
struct SweepSettings {
    DateRange train;
    DateRange test;
    CostParams costs;
    ForecastConfig forecast;
    SolverOptions solver;
    std::size_t mpo_horizon = 2;
    TrainingConfig training;
    std::size_t lookback = 20;
    std::size_t kernel = 5;
    std::uint64_t master_seed = 0;
    std::size_t seeds = 1;
    std::size_t jobs = 1;
};

struct SweepFailure {
    InvestorPreferences prefs;
    std::size_t seed = 0;
    std::string message;
};

struct SweepOutcome {
    std::vector<FrontierPoint> points;  ///< pair-major, then seed
    std::vector<SweepFailure> failures;
};

/// Seed of the forecast noise stream for seed index `s`.
std::uint64_t forecast_seed(std::uint64_t master, std::size_t s);
/// Seed of a FRONTIER training run for seed index `s` and grid pair `pair`.
std::uint64_t training_seed(std::uint64_t master, std::size_t s, std::size_t pair);

/**
 * Builds the strategy of one sweep task, training it first for FRONTIER.
 * `channel` may be null for families that do not read forecasts.
 */
std::unique_ptr<Strategy> prepare_strategy(const StrategyFamily& family, const MarketContext& market,
                                           const SweepSettings& settings, const InvestorPreferences& prefs,
                                           std::shared_ptr<const ForecastChannel> channel, std::uint64_t train_seed);

/**
 * Backtests the family over the test range for every (pair, seed). FRONTIER
 * is retrained per task on the train range; EW ignores preferences and seeds
 * and is simulated once. Tasks run on up to `settings.jobs` threads and the
 * output order does not depend on scheduling.
 */
SweepOutcome run_sweep(const StrategyFamily& family, const MarketContext& market, const SweepGrid& grid,
                       const SweepSettings& settings);

/// Non-dominated points sorted by excess risk, with strictly increasing excess return.
std::vector<FrontierPoint> pareto_filter(const std::vector<FrontierPoint>& points);

struct MeanFrontier {
    std::vector<double> grid;
    std::vector<double> mean;
    std::vector<double> ci_low;
    std::vector<double> ci_high;
};

/**
 * Interpolates each frontier linearly onto `resolution` evenly spaced risk
 * values over the intersection of their risk ranges and forms Student-t
 * confidence intervals with (frontiers - 1) degrees of freedom.
 */
MeanFrontier mean_frontier(const std::vector<std::vector<FrontierPoint>>& frontiers, std::size_t resolution = 100,
                           double confidence = 0.95);

/// Linear interpolation of a Pareto frontier's return at `risk` (inside its range).
double interpolate_frontier(const std::vector<FrontierPoint>& frontier, double risk);

/// Splits points by seed and returns the Pareto frontier of each seed, in seed order.
std::vector<std::vector<FrontierPoint>> frontiers_by_seed(const std::vector<FrontierPoint>& points);

}  // namespace frontier
