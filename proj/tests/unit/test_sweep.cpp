#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <numbers>
#include <random>

#include "frontier/error.hpp"
#include "frontier/sweep.hpp"
#include "frontier/synthetic.hpp"
#include "support/oracles.hpp"

using namespace frontier;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;

namespace {

FrontierPoint pt(double risk, double ret, std::size_t seed = 0) {
    FrontierPoint p;
    p.family = "spo";
    p.excess_risk = risk;
    p.excess_return = ret;
    p.seed = seed;
    return p;
}

std::vector<std::pair<double, double>> coords(const std::vector<FrontierPoint>& pts) {
    std::vector<std::pair<double, double>> out;
    for (const auto& p : pts) out.emplace_back(p.excess_risk, p.excess_return);
    return out;
}

std::vector<FrontierPoint> random_points(std::mt19937_64& rng, std::size_t count, bool coarse) {
    std::uniform_real_distribution<double> u(0, 1);
    std::uniform_int_distribution<int> level(0, 20);
    std::vector<FrontierPoint> pts;
    for (std::size_t i = 0; i < count; ++i) {
        // coarse values produce many exact ties in one or both coordinates
        pts.push_back(coarse ? pt(level(rng) * 0.001, level(rng) * 0.0005) : pt(u(rng) * 0.02, u(rng) * 0.001 - 0.0002));
    }
    return pts;
}

struct SweepWorld {
    MarketContext market{generate_market(trending_market(3, 320, 17)), MarketOptions{40, 0}};
    SweepSettings settings;

    SweepWorld() {
        const auto& d = market.panel().dates;
        settings.train = {d[60], d[220]};
        settings.test = {d[220], Date(2100, 1, 1)};
        settings.training.episodes = 3;
        settings.training.episode_length = 10;
        settings.lookback = 8;
        settings.kernel = 3;
    }
};

}  // namespace

TEST_CASE("grids", "[sweep]") {
    const auto full = SweepGrid::full();
    CHECK(full.risk_values.size() == 21);
    CHECK(full.trade_values.size() == 24);
    CHECK(full.size() == 504);
    CHECK(full.pairs().size() == 504);
    CHECK(full.risk_values.back() == 20000);
    CHECK(SweepGrid::small().size() == 12);
    const auto pairs = SweepGrid{{1, 2}, {10, 20, 30}}.pairs();
    CHECK(pairs[1] == InvestorPreferences{1, 20});
    CHECK(pairs[3] == InvestorPreferences{2, 10});
    CHECK_THROWS_AS((SweepGrid{{}, {1}}.validate()), ConfigError);
}

TEST_CASE("family labels", "[sweep]") {
    for (const char* label : {"ew", "spo", "mpo", "frontier-log-returns", "frontier-forecast-only", "frontier-all-inputs"}) {
        CHECK(StrategyFamily::parse(label).label() == label);
    }
    CHECK(StrategyFamily::parse("frontier-all-inputs").family() == "frontier");
    CHECK(StrategyFamily::parse("frontier-all-inputs").variant_name() == "all-inputs");
    CHECK(StrategyFamily::parse("spo").variant_name().empty());
    CHECK_FALSE(StrategyFamily::parse("ew").stochastic());
    CHECK_THROWS_AS(StrategyFamily::parse("frontier-lstm"), ConfigError);
}

TEST_CASE("pareto filter examples", "[sweep]") {
    auto both = pareto_filter({pt(1, 2), pt(2, 1)});
    CHECK(both.size() == 1);
    CHECK(both[0].excess_risk == 1);

    auto pair = pareto_filter({pt(1, 1), pt(2, 2)});
    REQUIRE(pair.size() == 2);
    CHECK(pair[0].excess_risk == 1);
    CHECK(pair[1].excess_risk == 2);

    auto tie = pareto_filter({pt(2, 2), pt(1, 2)});
    REQUIRE(tie.size() == 1);
    CHECK(tie[0].excess_risk == 1);

    auto dup = pareto_filter({pt(1, 2, 4), pt(1, 2, 9)});
    REQUIRE(dup.size() == 1);
    CHECK(dup[0].seed == 4);

    CHECK_THROWS(pareto_filter({}));
}

TEST_CASE("pareto filter matches the pairwise oracle", "[sweep][oracle]") {
    std::mt19937_64 rng(23);
    for (bool coarse : {false, true}) {
        const auto pts = random_points(rng, 1000, coarse);
        const auto front = pareto_filter(pts);
        const auto keep = oracle::non_dominated(coords(pts));
        std::vector<std::pair<double, double>> expected;
        for (auto i : keep) expected.emplace_back(pts[i].excess_risk, pts[i].excess_return);
        std::sort(expected.begin(), expected.end());
        CHECK(coords(front) == expected);
    }
}

TEST_CASE("pareto filter properties", "[sweep][property]") {
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 30; ++trial) {
        const auto pts = random_points(rng, 200, trial % 2 == 0);
        const auto front = pareto_filter(pts);

        CHECK(coords(pareto_filter(front)) == coords(front));

        auto shuffled = pts;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        CHECK(coords(pareto_filter(shuffled)) == coords(front));

        for (std::size_t k = 1; k < front.size(); ++k) {
            REQUIRE(front[k].excess_risk > front[k - 1].excess_risk);
            REQUIRE(front[k].excess_return > front[k - 1].excess_return);
        }
        for (const auto& p : pts) {
            const bool covered = std::any_of(front.begin(), front.end(), [&](const FrontierPoint& f) {
                return f.excess_risk <= p.excess_risk && f.excess_return >= p.excess_return;
            });
            REQUIRE(covered);
        }
    }
}

TEST_CASE("mean frontier", "[sweep]") {
    const std::vector<FrontierPoint> base{pt(0.001, 0.0001), pt(0.004, 0.0003), pt(0.01, 0.0004)};

    SECTION("identical frontiers have zero width") {
        const auto m = mean_frontier({base, base, base}, 25);
        REQUIRE(m.grid.size() == 25);
        CHECK(m.grid.front() == 0.001);
        CHECK(m.grid.back() == 0.01);
        for (std::size_t k = 0; k < m.grid.size(); ++k) {
            CHECK_THAT(m.mean[k], WithinAbs(interpolate_frontier(base, m.grid[k]), 1e-18));
            CHECK_THAT(m.ci_low[k], WithinAbs(m.mean[k], 1e-18));
            CHECK_THAT(m.ci_high[k], WithinAbs(m.mean[k], 1e-18));
        }
    }
    SECTION("two seeds offset by plus and minus d") {
        const double d = 0.00005;
        auto up = base, down = base;
        for (auto& p : up) p.excess_return += d;
        for (auto& p : down) p.excess_return -= d;
        const auto m = mean_frontier({up, down}, 10);
        // t quantile with one degree of freedom is the Cauchy quantile tan(pi (q - 1/2))
        const double t975 = std::tan(std::numbers::pi * 0.475);
        const double half = t975 * (d * std::sqrt(2.0)) / std::sqrt(2.0);
        for (std::size_t k = 0; k < m.grid.size(); ++k) {
            CHECK_THAT(m.mean[k], WithinAbs(interpolate_frontier(base, m.grid[k]), 1e-15));
            CHECK_THAT(m.ci_high[k] - m.mean[k], WithinAbs(half, 1e-12));
            CHECK_THAT(m.mean[k] - m.ci_low[k], WithinAbs(half, 1e-12));
        }
    }
    SECTION("grid covers only the shared range") {
        const std::vector<FrontierPoint> other{pt(0.002, 0.0001), pt(0.02, 0.0009)};
        const auto m = mean_frontier({base, other}, 5);
        CHECK(m.grid.front() == 0.002);
        CHECK(m.grid.back() == 0.01);
        for (std::size_t k = 0; k < 5; ++k) CHECK(m.ci_low[k] <= m.mean[k]);
    }
    SECTION("disjoint ranges") {
        CHECK_THROWS_WITH(mean_frontier({{pt(0.001, 0), pt(0.002, 1)}, {pt(0.003, 0), pt(0.004, 1)}}),
                          ContainsSubstring("disjoint support"));
    }
    SECTION("needs two frontiers") {
        CHECK_THROWS_AS(mean_frontier({base}), ConfigError);
    }
}

TEST_CASE("interpolation", "[sweep]") {
    const std::vector<FrontierPoint> f{pt(1, 10), pt(3, 20)};
    CHECK(interpolate_frontier(f, 1) == 10);
    CHECK(interpolate_frontier(f, 2) == 15);
    CHECK(interpolate_frontier(f, 3) == 20);
    CHECK_THROWS(interpolate_frontier(f, 3.5));
}

TEST_CASE("seeds are well separated", "[sweep]") {
    CHECK(forecast_seed(0, 0) != forecast_seed(0, 1));
    CHECK(forecast_seed(0, 0) != forecast_seed(1, 0));
    CHECK(training_seed(0, 0, 0) != training_seed(0, 0, 1));
    CHECK(training_seed(0, 0, 0) != forecast_seed(0, 0));
    CHECK(training_seed(5, 2, 3) == training_seed(5, 2, 3));
}

TEST_CASE("equal weight sweeps collapse to one point", "[sweep]") {
    SweepWorld world;
    world.settings.seeds = 2;
    const auto grid = SweepGrid::small();
    const auto out = run_sweep(StrategyFamily::parse("ew"), world.market, grid, world.settings);
    CHECK(out.failures.empty());
    REQUIRE(out.points.size() == grid.size() * 2);
    for (const auto& p : out.points) {
        CHECK(p.excess_risk == out.points[0].excess_risk);
        CHECK(p.excess_return == out.points[0].excess_return);
    }
    CHECK(pareto_filter(out.points).size() == 1);
}

TEST_CASE("sweep counts and determinism", "[sweep]") {
    SweepWorld world;
    world.settings.seeds = 2;
    const SweepGrid grid{{1, 100}, {1, 10}};
    const auto family = StrategyFamily::parse("frontier-log-returns");
    const auto a = run_sweep(family, world.market, grid, world.settings);
    REQUIRE(a.failures.empty());
    REQUIRE(a.points.size() == 8);
    CHECK(a.points[0].seed == 0);
    CHECK(a.points[1].seed == 1);
    CHECK(a.points[2].prefs == InvestorPreferences{1, 10});
    CHECK(a.points[0].family == "frontier");
    CHECK(a.points[0].variant == "log-returns");

    world.settings.jobs = 3;
    const auto b = run_sweep(family, world.market, grid, world.settings);
    REQUIRE(b.points.size() == 8);
    for (std::size_t k = 0; k < 8; ++k) {
        CHECK(a.points[k].excess_risk == b.points[k].excess_risk);
        CHECK(a.points[k].excess_return == b.points[k].excess_return);
    }
    CHECK(frontiers_by_seed(a.points).size() == 2);
}

TEST_CASE("convex sweeps reach cash at the top of the risk grid", "[sweep]") {
    SweepWorld world;
    const SweepGrid grid{{0.1, 20000}, {1}};
    const auto out = run_sweep(StrategyFamily::parse("spo"), world.market, grid, world.settings);
    REQUIRE(out.points.size() == 2);
    CHECK(out.points[1].excess_risk < out.points[0].excess_risk);
    CHECK(out.points[1].excess_risk < 1e-4);
}

TEST_CASE("failed tasks are reported", "[sweep]") {
    SweepWorld world;
    world.settings.train = {world.market.panel().dates[300], world.market.panel().dates[305]};
    const auto out =
        run_sweep(StrategyFamily::parse("frontier-log-returns"), world.market, SweepGrid{{1}, {1, 2}}, world.settings);
    CHECK(out.points.empty());
    REQUIRE(out.failures.size() == 2);
    CHECK(out.failures[0].prefs == InvestorPreferences{1, 1});
    CHECK_THAT(out.failures[0].message, ContainsSubstring("training range"));
}
