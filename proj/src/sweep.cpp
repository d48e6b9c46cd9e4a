#include "frontier/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <numeric>
#include <thread>

#include "frontier/backtest.hpp"
#include "frontier/error.hpp"

namespace frontier {

SweepGrid SweepGrid::full() {
    return SweepGrid{
        {0.1, 0.178, 0.316, 0.562, 1, 2, 3, 6, 10, 18, 32, 56, 100, 178, 316, 562, 1000, 2000, 5000, 10000, 20000},
        {0.1, 0.5, 1, 2, 3, 4, 5, 5.5, 6, 6.5, 7, 7.5, 8, 9, 10, 11, 12, 15, 20, 30, 45, 60, 100, 200}};
}

SweepGrid SweepGrid::small() { return SweepGrid{{0.1, 1, 10, 100, 1000, 20000}, {1, 10}}; }

std::vector<InvestorPreferences> SweepGrid::pairs() const {
    std::vector<InvestorPreferences> out;
    out.reserve(size());
    for (double r : risk_values) {
        for (double t : trade_values) out.push_back(InvestorPreferences{r, t});
    }
    return out;
}

void SweepGrid::validate() const {
    if (risk_values.empty() || trade_values.empty()) throw ConfigError("empty preference grid");
    for (const auto& p : pairs()) p.validate();
}

std::string StrategyFamily::family() const {
    switch (kind) {
        case Kind::EqualWeight: return "ew";
        case Kind::Spo: return "spo";
        case Kind::Mpo: return "mpo";
        case Kind::Frontier: return "frontier";
    }
    return "unknown";
}

std::string StrategyFamily::variant_name() const {
    return kind == Kind::Frontier ? std::string(to_string(variant)) : std::string();
}

std::string StrategyFamily::label() const {
    return kind == Kind::Frontier ? family() + "-" + variant_name() : family();
}

StrategyFamily StrategyFamily::parse(std::string_view text) {
    if (text == "ew") return {Kind::EqualWeight, {}};
    if (text == "spo") return {Kind::Spo, {}};
    if (text == "mpo") return {Kind::Mpo, {}};
    constexpr std::string_view prefix = "frontier-";
    if (text.substr(0, prefix.size()) == prefix) {
        return {Kind::Frontier, parse_policy_variant(text.substr(prefix.size()))};
    }
    throw ConfigError("unknown strategy family '" + std::string(text) + "'");
}

std::uint64_t forecast_seed(std::uint64_t master, std::size_t s) { return mix_seed(master, s, 0x5eed); }

std::uint64_t training_seed(std::uint64_t master, std::size_t s, std::size_t pair) {
    return mix_seed(mix_seed(master, s, 0x7a1d), pair);
}

namespace {

FrontierPoint make_point(const StrategyFamily& family, const InvestorPreferences& prefs, std::size_t seed,
                         const PerformanceSummary& summary) {
    return FrontierPoint{family.family(), family.variant_name(), prefs, seed,
                         summary.excess_risk, summary.excess_return, summary.sharpe};
}

template <class Task>
void run_pool(std::size_t count, std::size_t jobs, const Task& task) {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) task(i);
    };
    const std::size_t threads = std::max<std::size_t>(1, std::min(jobs, count));
    if (threads == 1) {
        worker();
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t k = 0; k < threads; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

}  // namespace

std::unique_ptr<Strategy> prepare_strategy(const StrategyFamily& family, const MarketContext& market,
                                           const SweepSettings& s, const InvestorPreferences& prefs,
                                           std::shared_ptr<const ForecastChannel> channel, std::uint64_t train_seed) {
    if (family.kind == StrategyFamily::Kind::EqualWeight) return std::make_unique<EqualWeightStrategy>();
    if (family.kind == StrategyFamily::Kind::Frontier) {
        PolicyArchitecture arch;
        arch.variant = family.variant;
        arch.num_risky = market.num_risky();
        arch.lookback = s.lookback;
        arch.kernel = s.kernel;
        arch.horizon = static_cast<std::size_t>(s.forecast.horizon);
        const auto [first, last] = period_span(market, s.train);
        auto features = std::make_shared<const FeatureBuilder>(market, channel, arch, first);
        const TrainingData data{market, *features, std::max(first, features->first_valid_period()), last, s.costs};
        auto net = std::make_shared<const PolicyNetwork>(
            train(PolicyNetwork::initialized(arch, train_seed, s.training.init_scale), data, prefs, s.training, train_seed));
        return std::make_unique<PolicyStrategy>(net, features);
    }
    ConvexStrategyOptions options;
    options.prefs = prefs;
    options.costs = s.costs;
    options.horizon = family.kind == StrategyFamily::Kind::Mpo ? s.mpo_horizon : 1;
    options.solver = s.solver;
    return std::make_unique<ConvexStrategy>(std::move(channel), options);
}

SweepOutcome run_sweep(const StrategyFamily& family, const MarketContext& market, const SweepGrid& grid,
                       const SweepSettings& settings) {
    grid.validate();
    if (settings.seeds < 1) throw ConfigError("at least one seed is required");
    const auto pairs = grid.pairs();
    const std::size_t seeds = settings.seeds;
    SweepOutcome out;

    if (family.kind == StrategyFamily::Kind::EqualWeight) {
        EqualWeightStrategy ew;
        PerformanceSummary summary;
        try {
            summary = run_backtest(ew, market, settings.test, settings.costs).summary;
        } catch (const std::exception& e) {
            out.failures.push_back(SweepFailure{pairs.front(), 0, e.what()});
            return out;
        }
        for (const auto& prefs : pairs) {
            for (std::size_t s = 0; s < seeds; ++s) out.points.push_back(make_point(family, prefs, s, summary));
        }
        return out;
    }

    std::vector<std::shared_ptr<const ForecastChannel>> channels;
    for (std::size_t s = 0; s < seeds; ++s) {
        channels.push_back(std::make_shared<const ForecastChannel>(market, settings.forecast,
                                                                   forecast_seed(settings.master_seed, s)));
    }

    const std::size_t count = pairs.size() * seeds;
    std::vector<std::optional<FrontierPoint>> points(count);
    std::vector<std::optional<std::string>> errors(count);
    run_pool(count, settings.jobs, [&](std::size_t task) {
        const std::size_t pair = task / seeds;
        const std::size_t s = task % seeds;
        try {
            const auto strategy = prepare_strategy(family, market, settings, pairs[pair], channels[s],
                                                   training_seed(settings.master_seed, s, pair));
            const auto summary = run_backtest(*strategy, market, settings.test, settings.costs).summary;
            points[task] = make_point(family, pairs[pair], s, summary);
        } catch (const std::exception& e) {
            errors[task] = e.what();
        }
    });

    for (std::size_t task = 0; task < count; ++task) {
        if (points[task]) out.points.push_back(std::move(*points[task]));
        if (errors[task]) out.failures.push_back(SweepFailure{pairs[task / seeds], task % seeds, *errors[task]});
    }
    return out;
}

std::vector<FrontierPoint> pareto_filter(const std::vector<FrontierPoint>& points) {
    if (points.empty()) throw ConfigError("cannot extract a frontier from no points");
    std::vector<std::size_t> order(points.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        if (points[i].excess_risk != points[j].excess_risk) return points[i].excess_risk < points[j].excess_risk;
        return points[i].excess_return > points[j].excess_return;
    });
    std::vector<FrontierPoint> out;
    for (std::size_t i : order) {
        if (out.empty() || points[i].excess_return > out.back().excess_return) out.push_back(points[i]);
    }
    return out;
}

double interpolate_frontier(const std::vector<FrontierPoint>& frontier, double risk) {
    if (frontier.empty()) throw ConfigError("empty frontier");
    if (risk < frontier.front().excess_risk || risk > frontier.back().excess_risk) {
        throw NumericalError("risk value outside the frontier's range");
    }
    const auto it = std::lower_bound(frontier.begin(), frontier.end(), risk,
                                     [](const FrontierPoint& p, double x) { return p.excess_risk < x; });
    if (it->excess_risk == risk || it == frontier.begin()) return it->excess_return;
    const auto& lo = *(it - 1);
    const auto& hi = *it;
    const double u = (risk - lo.excess_risk) / (hi.excess_risk - lo.excess_risk);
    return lo.excess_return + u * (hi.excess_return - lo.excess_return);
}

MeanFrontier mean_frontier(const std::vector<std::vector<FrontierPoint>>& frontiers, std::size_t resolution,
                           double confidence) {
    if (frontiers.size() < 2) throw ConfigError("a mean frontier needs at least two frontiers");
    if (resolution < 1) throw ConfigError("grid resolution must be >= 1");
    if (!(confidence > 0.0 && confidence < 1.0)) throw ConfigError("confidence level must lie in (0, 1)");
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (const auto& f : frontiers) {
        if (f.empty()) throw ConfigError("empty frontier");
        lo = std::max(lo, f.front().excess_risk);
        hi = std::min(hi, f.back().excess_risk);
    }
    if (lo > hi) throw NumericalError("disjoint support: seed frontiers share no excess-risk range");

    MeanFrontier out;
    const std::size_t points = lo == hi ? 1 : std::max<std::size_t>(resolution, 2);
    for (std::size_t j = 0; j < points; ++j) {
        const double x = points == 1 ? lo
                         : j + 1 == points ? hi
                                           : lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(points - 1);
        out.grid.push_back(x);
    }

    const auto m = static_cast<double>(frontiers.size());
    const boost::math::students_t dist(m - 1.0);
    const double q = boost::math::quantile(boost::math::complement(dist, (1.0 - confidence) / 2.0));
    std::vector<double> values(frontiers.size());
    for (double x : out.grid) {
        for (std::size_t k = 0; k < frontiers.size(); ++k) values[k] = interpolate_frontier(frontiers[k], x);
        const double mean = std::accumulate(values.begin(), values.end(), 0.0) / m;
        double ss = 0.0;
        for (double v : values) ss += (v - mean) * (v - mean);
        const double half = q * std::sqrt(ss / (m - 1.0)) / std::sqrt(m);
        out.mean.push_back(mean);
        out.ci_low.push_back(mean - half);
        out.ci_high.push_back(mean + half);
    }
    return out;
}

std::vector<std::vector<FrontierPoint>> frontiers_by_seed(const std::vector<FrontierPoint>& points) {
    std::map<std::size_t, std::vector<FrontierPoint>> groups;
    for (const auto& p : points) groups[p.seed].push_back(p);
    std::vector<std::vector<FrontierPoint>> out;
    for (auto& [seed, group] : groups) out.push_back(pareto_filter(group));
    return out;
}

}  // namespace frontier
