#include "frontier/backtest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "frontier/error.hpp"

namespace frontier {

namespace {

constexpr double kSimplexTolerance = 1e-7;

Eigen::VectorXd checked_holdings(const Eigen::VectorXd& x, std::size_t slots, const std::string& who,
                                 const Date& date) {
    auto fail = [&](const std::string& what) {
        throw NumericalError("strategy '" + who + "' returned " + what + " on " + date.to_string());
    };
    if (static_cast<std::size_t>(x.size()) != slots) fail("a weight vector of the wrong size");
    if (!x.allFinite()) fail("non-finite weights");
    if (x.minCoeff() < -kSimplexTolerance || std::abs(x.sum() - 1.0) > kSimplexTolerance) {
        fail("non-simplex weights");
    }
    Eigen::VectorXd clean = x.cwiseMax(0.0);
    return clean / clean.sum();
}

}  // namespace

std::pair<std::size_t, std::size_t> period_span(const MarketContext& market, const DateRange& range) {
    const auto& dates = market.panel().dates;
    std::size_t first = dates.size();
    std::size_t last = 0;
    for (std::size_t t = 1; t < dates.size(); ++t) {
        if (!range.contains(dates[t])) continue;
        first = std::min(first, t);
        last = t + 1;
    }
    if (first >= last) throw ConfigError("date range " + range.first.to_string() + " .. " +
                                         range.last.to_string() + " selects no periods");
    return {first, last};
}

BacktestResult run_backtest(Strategy& strategy, const MarketContext& market, const DateRange& range,
                            const CostParams& params, const std::optional<PortfolioState>& initial) {
    params.validate();
    const auto [first, last] = period_span(market, range);
    const std::size_t need = strategy.first_valid_period(market);
    if (first < need) {
        throw HistoryError("insufficient warm-up: strategy '" + strategy.name() + "' needs " +
                           std::to_string(need) + " days of history, range starts at day " + std::to_string(first));
    }

    PortfolioState state = initial ? *initial : PortfolioState::all_cash(market.num_risky());
    state.trade = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(market.num_slots()));
    state.validate();

    BacktestResult out;
    out.assets = market.panel().assets;
    out.assets.push_back("cash");
    const std::size_t periods = last - first;
    out.dates.reserve(periods);
    out.weights.reserve(periods);
    out.trades.reserve(periods);

    for (std::size_t t = first; t < last; ++t) {
        const Date& date = market.panel().dates[t];
        const Eigen::VectorXd x =
            checked_holdings(strategy.decide(DecisionContext{t, market, state}), market.num_slots(), strategy.name(), date);
        state.trade = x - state.weights;

        const Eigen::VectorXd r = market.period_return(t);
        const double cost = transaction_cost(state.trade, market.realized_costs(t, state.value), params);
        const double ret = realized_return(r, state, cost);
        const double growth = 1.0 + ret;
        if (!(growth > 0.0)) throw NumericalError("portfolio value is no longer positive on " + date.to_string());

        out.dates.push_back(date);
        out.weights.push_back(x);
        out.trades.push_back(state.trade);
        out.costs.push_back(cost);
        out.returns.push_back(ret);
        out.risk_free.push_back(market.risk_free(t));

        state.value *= growth;
        out.values.push_back(state.value);
        state.weights = (x.array() * (1.0 + r.array() - cost)).matrix() / growth;
    }

    out.summary = summarize(out.returns, out.risk_free);
    return out;
}

void write_backtest_csv(const BacktestResult& result, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    out << "date,asset,weight,trade,cost,return\n";
    char buf[160];
    for (std::size_t p = 0; p < result.num_periods(); ++p) {
        const std::string date = result.dates[p].to_string();
        for (std::size_t i = 0; i < result.assets.size(); ++i) {
            const auto idx = static_cast<Eigen::Index>(i);
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g", result.weights[p](idx), result.trades[p](idx),
                          result.costs[p], result.returns[p]);
            out << date << ',' << result.assets[i] << ',' << buf << '\n';
        }
    }
}

Eigen::VectorXd EqualWeightStrategy::decide(const DecisionContext& ctx) {
    const auto n = static_cast<Eigen::Index>(ctx.market.num_risky());
    Eigen::VectorXd x = Eigen::VectorXd::Constant(n + 1, 1.0 / static_cast<double>(n));
    x(n) = 0.0;
    return x;
}

Eigen::VectorXd CashStrategy::decide(const DecisionContext& ctx) {
    const auto n = static_cast<Eigen::Index>(ctx.market.num_risky());
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n + 1);
    x(n) = 1.0;
    return x;
}

Eigen::VectorXd BuyAndHoldStrategy::decide(const DecisionContext& ctx) {
    if (invested_) return ctx.state.weights;
    invested_ = true;
    return target_;
}

ConvexStrategy::ConvexStrategy(std::shared_ptr<const ForecastChannel> forecasts, ConvexStrategyOptions options)
    : forecasts_(std::move(forecasts)), options_(options) {
    if (!forecasts_) throw ConfigError("convex strategy needs a forecast channel");
    if (options_.horizon < 1) throw ConfigError("planning horizon must be >= 1");
    options_.prefs.validate();
    options_.costs.validate();
}

std::size_t ConvexStrategy::first_valid_period(const MarketContext& market) const {
    return std::max(market.first_risk_period(), kRollingWindow);
}

Eigen::VectorXd ConvexStrategy::decide(const DecisionContext& ctx) {
    const auto& market = ctx.market;
    const std::size_t t = ctx.period;
    const auto risk = market.risk_model(t);
    const CostInputs estimates = market.estimated_costs(t, ctx.state.value);
    const auto forecasts = forecasts_->forecasts(t, options_.horizon);
    // The plan is cut short where forecasts run out at the end of the data.
    const TradeProblem problem = build_mpo(forecasts, ctx.state, risk, estimates, options_.costs, options_.prefs,
                                           ConstraintSet{}, forecasts.size());
    last_plan_ = solve(problem, options_.solver);
    return last_plan_.next_weights();
}

}  // namespace frontier
