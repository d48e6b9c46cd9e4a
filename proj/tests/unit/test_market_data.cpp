#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <random>

#include "frontier/error.hpp"
#include "frontier/market_data.hpp"
#include "frontier/synthetic.hpp"

using namespace frontier;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;

namespace {

struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& name) : path(std::filesystem::temp_directory_path() / name) {
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    void write(const std::string& file, const std::string& text) const { std::ofstream(path / file) << text; }
};

const char* kHeader = "date,open,high,low,close,volume\n";

DateRange all_dates() { return {Date(2000, 1, 1), Date(2100, 1, 1)}; }

PricePanel one_asset(std::vector<double> closes, std::vector<double> volumes = {}) {
    PricePanel p;
    p.assets = {"A"};
    const auto n = static_cast<Eigen::Index>(closes.size());
    p.dates = business_days(Date(2020, 1, 6), closes.size());
    p.close = Eigen::Map<Eigen::VectorXd>(closes.data(), n);
    p.open = p.close;
    p.high = p.close;
    p.low = p.close;
    if (volumes.empty()) volumes.assign(closes.size(), 1000.0);
    p.volume = Eigen::Map<Eigen::VectorXd>(volumes.data(), n);
    p.risk_free = Eigen::VectorXd::Zero(n);
    return p;
}

}  // namespace

TEST_CASE("load_panel reads aligned asset files", "[market-data]") {
    TempDir dir("frontier_load_ok");
    dir.write("risk_free.csv", "date,rate\n2021-03-01,0.0001\n2021-03-02,0.0001\n2021-03-03,0.0002\n");
    dir.write("AAA.csv", std::string(kHeader) + "2021-03-01,10,11,9,10.5,100\n2021-03-02,10.5,11,10,11,120\n"
                                                "2021-03-03,11,12,10,11.5,90\n");
    dir.write("BBB.csv", std::string(kHeader) + "2021-03-01,20,21,19,20,500\n2021-03-02,20,21,19,19,400\n"
                                                "2021-03-03,19,20,18,19.5,450\n");
    const PricePanel p = load_panel(PanelSource{dir.path, {}, "risk_free.csv"}, all_dates());
    CHECK(p.num_risky() == 2);
    CHECK(p.num_dates() == 3);
    CHECK(p.assets == std::vector<std::string>{"AAA", "BBB"});
    CHECK(p.close(1, 0) == 11.0);
    CHECK(p.volume(2, 1) == 450.0);
    CHECK(p.risk_free(2) == 0.0002);
}

TEST_CASE("load_panel rejects bad input", "[market-data]") {
    TempDir dir("frontier_load_bad");
    dir.write("risk_free.csv", "date,rate\n2021-03-01,0\n2021-03-02,0\n2021-03-03,0\n");
    const PanelSource src{dir.path, {"AAA"}, "risk_free.csv"};

    SECTION("missing interior date") {
        dir.write("AAA.csv", std::string(kHeader) + "2021-03-01,1,1,1,1,1\n2021-03-03,1,1,1,1,1\n");
        CHECK_THROWS_WITH(load_panel(src, all_dates()), ContainsSubstring("calendar misalignment"));
    }
    SECTION("zero close") {
        dir.write("AAA.csv", std::string(kHeader) + "2021-03-01,1,1,1,1,1\n2021-03-02,1,1,1,0,1\n2021-03-03,1,1,1,1,1\n");
        CHECK_THROWS_WITH(load_panel(src, all_dates()), ContainsSubstring("non-positive price"));
    }
    SECTION("malformed row") {
        dir.write("AAA.csv", std::string(kHeader) + "2021-03-01,1,1,1,1,1\n2021-03-02,1,x,1,1,1\n2021-03-03,1,1,1,1,1\n");
        CHECK_THROWS_WITH(load_panel(src, all_dates()), ContainsSubstring("malformed row"));
    }
    SECTION("missing file") {
        CHECK_THROWS_WITH(load_panel(src, all_dates()), ContainsSubstring("missing file"));
    }
}

TEST_CASE("write_panel and load_panel round-trip", "[market-data]") {
    TempDir dir("frontier_roundtrip");
    auto spec = trending_market(3, 40, 7);
    const PricePanel p = generate_market(spec);
    write_panel(p, dir.path);
    const PricePanel q = load_panel(PanelSource{dir.path, {}, "risk_free.csv"}, all_dates());
    CHECK(q.assets == p.assets);
    CHECK(q.dates == p.dates);
    CHECK(q.close == p.close);
    CHECK(q.open == p.open);
    CHECK(q.volume == p.volume);
    CHECK(q.risk_free == p.risk_free);
}

TEST_CASE("compute_returns", "[market-data]") {
    SECTION("100 -> 110") {
        const auto r = compute_returns(one_asset({100, 110}));
        CHECK_THAT(r.simple(0, 0), WithinAbs(0.10, 1e-15));
        CHECK_THAT(r.log(0, 0), WithinAbs(0.09531017980432493, 1e-15));
    }
    SECTION("flat") {
        const auto r = compute_returns(one_asset({50, 50, 50}));
        CHECK(r.simple.col(0).isZero(0));
        CHECK(r.log.col(0).isZero(0));
    }
    SECTION("halving") {
        CHECK_THAT(compute_returns(one_asset({100, 50})).simple(0, 0), WithinAbs(-0.5, 1e-15));
    }
    SECTION("single date") {
        CHECK_THROWS_AS(compute_returns(one_asset({100})), DataError);
    }
    SECTION("cash column equals the risk-free series and log matches simple") {
        const PricePanel p = generate_market(trending_market(4, 300, 3));
        const auto r = compute_returns(p);
        for (Eigen::Index t = 0; t < r.simple.rows(); ++t) {
            CHECK(r.simple(t, 4) == p.risk_free(t + 1));
            for (Eigen::Index i = 0; i < 5; ++i) {
                REQUIRE(std::abs(std::expm1(r.log(t, i)) - r.simple(t, i)) <= 1e-12);
            }
        }
    }
}

TEST_CASE("rolling estimates use the ten days before t", "[market-data]") {
    std::vector<double> vols;
    for (int k = 1; k <= 10; ++k) vols.push_back(k);
    vols.push_back(1e9);  // day t itself must not enter
    auto p = one_asset(std::vector<double>(11, 10.0), vols);
    CHECK(rolling_volume_estimate(p, 10)(0) == 5.5);
    CHECK(rolling_volume_estimate(one_asset(std::vector<double>(12, 10.0), std::vector<double>(12, 1000.0)), 11)(0) ==
          1000.0);
    CHECK_THROWS_WITH(rolling_volume_estimate(p, 5), ContainsSubstring("insufficient history"));

    Eigen::MatrixXd sig(11, 1);
    for (int k = 0; k < 11; ++k) sig(k, 0) = 0.01 * k;
    CHECK_THAT(rolling_volatility_estimate(sig, 10)(0), WithinAbs(0.045, 1e-15));
    CHECK_THAT(rolling_volatility_estimate(Eigen::MatrixXd::Constant(12, 1, 0.01), 12)(0), WithinAbs(0.01, 1e-16));
    CHECK_THROWS_AS(rolling_volatility_estimate(sig, 3), HistoryError);
}

TEST_CASE("rolling estimates are shift-equivariant", "[market-data][property]") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0, 100);
    Eigen::MatrixXd s(60, 3);
    for (Eigen::Index i = 0; i < s.size(); ++i) s.data()[i] = u(rng);
    Eigen::MatrixXd shifted(61, 3);
    shifted.row(0).setConstant(u(rng));
    shifted.bottomRows(60) = s;
    for (std::size_t t = 10; t <= 60; ++t) {
        CHECK((trailing_mean(s, t) - trailing_mean(shifted, t + 1)).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("intraday volatility proxy", "[market-data]") {
    CHECK(intraday_volatility_proxy(100, 100) == 0.0);
    CHECK_THAT(intraday_volatility_proxy(100, 110), WithinAbs(0.09531017980432493, 1e-15));
    CHECK(intraday_volatility_proxy(110, 100) == intraday_volatility_proxy(100, 110));
    CHECK_THROWS_WITH(intraday_volatility_proxy(0, 100), ContainsSubstring("non-positive price"));
}

TEST_CASE("simulated forecasts", "[market-data]") {
    ForecastConfig cfg;
    CHECK_THAT(cfg.alpha(), WithinAbs(0.2, 1e-15));

    Eigen::Vector2d r(0.01, -0.02);
    SECTION("noiseless is the identity") {
        ForecastConfig exact{0.0, 0.005, 2};
        std::mt19937_64 rng(5);
        CHECK(simulate_forecast(r, exact, rng) == r);
    }
    SECTION("same seed, same forecast") {
        std::mt19937_64 a(42), b(42);
        CHECK(simulate_forecast(r, cfg, a) == simulate_forecast(r, cfg, b));
    }
    SECTION("mean over many draws is alpha r") {
        const int draws = 10000;
        Eigen::Vector2d sum = Eigen::Vector2d::Zero();
        for (int s = 0; s < draws; ++s) {
            std::mt19937_64 rng(static_cast<std::uint64_t>(s) * 7919 + 1);
            sum += simulate_forecast(r, cfg, rng);
        }
        const Eigen::Vector2d mean = sum / draws;
        const double se = cfg.alpha() * std::sqrt(cfg.noise_variance / draws);
        CHECK(std::abs(mean(0) - 0.2 * r(0)) < 3 * se);
        CHECK(std::abs(mean(1) - 0.2 * r(1)) < 3 * se);
    }
    SECTION("counter-based noise does not depend on draw order") {
        ForecastNoise noise(9, 0.02);
        const double late = noise.draw(3, 100);
        const double early = noise.draw(0, 1);
        CHECK(noise.draw(3, 100) == late);
        CHECK(noise.draw(0, 1) == early);
        CHECK(late != early);
    }
}

TEST_CASE("feature normalization", "[market-data]") {
    Eigen::MatrixXd v = Eigen::MatrixXd::Constant(40, 2, 3.0);
    CHECK(normalize_features(v, 35).isOnes(0));

    Eigen::MatrixXd w = Eigen::MatrixXd::Constant(32, 1, 2.0);
    w(30, 0) = 2.0;
    w(31, 0) = 4.0;
    const auto scaled = normalize_features(w, 30);
    CHECK(scaled(30, 0) == 1.0);
    CHECK(scaled(31, 0) == 2.0);

    CHECK_THROWS_WITH(normalize_features(Eigen::MatrixXd::Zero(40, 1), 35), ContainsSubstring("degenerate baseline"));
    CHECK_THROWS_AS(normalize_features(v, 20), HistoryError);
}
