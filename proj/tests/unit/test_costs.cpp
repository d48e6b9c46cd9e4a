#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "frontier/costs.hpp"
#include "frontier/error.hpp"
#include "support/oracles.hpp"

using namespace frontier;
using Catch::Matchers::WithinAbs;

namespace {

std::vector<double> as_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

TEST_CASE("transaction cost worked values", "[costs]") {
    const Eigen::VectorXd sigma = Eigen::VectorXd::Constant(2, 0.01);
    const Eigen::VectorXd volume = Eigen::VectorXd::Constant(2, 1e6);

    CHECK(transaction_cost(Eigen::VectorXd::Zero(3), sigma, volume, 1e4, CostParams{}) == 0.0);

    Eigen::Vector3d z(0.1, -0.1, 0.0);
    CHECK_THAT(transaction_cost(z, sigma, volume, 1e4, CostParams{0.0005, 0, 0}), WithinAbs(1e-4, 1e-18));

    Eigen::Vector2d single(0.04, -0.04);
    CHECK_THAT(transaction_cost(single, Eigen::VectorXd::Constant(1, 0.01), Eigen::VectorXd::Constant(1, 4.0), 1.0,
                                CostParams{0, 1, 0}),
               WithinAbs(4.0e-5, 1e-18));

    Eigen::Vector2d buy(0.1, -0.1), sell(-0.1, 0.1);
    const Eigen::VectorXd s1 = Eigen::VectorXd::Constant(1, 0.01), v1 = Eigen::VectorXd::Constant(1, 1.0);
    CHECK_THAT(transaction_cost(buy, s1, v1, 1.0, CostParams{0, 0, 1}), WithinAbs(0.1, 1e-17));
    CHECK_THAT(transaction_cost(sell, s1, v1, 1.0, CostParams{0, 0, 1}), WithinAbs(-0.1, 1e-17));
}

TEST_CASE("cash leg is free", "[costs]") {
    Eigen::Vector3d z(0, 0, 0.5);
    CHECK(transaction_cost(z, Eigen::VectorXd::Constant(2, 0.02), Eigen::VectorXd::Constant(2, 10.0), 1.0,
                           CostParams{0.01, 1, 1}) == 0.0);
}

TEST_CASE("zero volume with a trade is an error", "[costs]") {
    Eigen::Vector2d z(0.1, -0.1);
    CHECK_THROWS_AS(transaction_cost(z, Eigen::VectorXd::Constant(1, 0.01), Eigen::VectorXd::Zero(1), 1.0, CostParams{}),
                    DataError);
    CHECK(transaction_cost(Eigen::VectorXd::Zero(2), Eigen::VectorXd::Constant(1, 0.01), Eigen::VectorXd::Zero(1), 1.0,
                           CostParams{}) == 0.0);
}

TEST_CASE("cost is symmetric and convex", "[costs][property]") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0, 1);
    for (int trial = 0; trial < 200; ++trial) {
        const Eigen::Index n = 1 + trial % 6;
        Eigen::VectorXd sigma(n), volume(n), z1(n + 1), z2(n + 1);
        for (Eigen::Index i = 0; i < n; ++i) {
            sigma(i) = 0.001 + 0.05 * u(rng);
            volume(i) = 1e5 * (1 + 100 * u(rng));
            z1(i) = u(rng) - 0.5;
            z2(i) = u(rng) - 0.5;
        }
        z1(n) = -z1.head(n).sum();
        z2(n) = -z2.head(n).sum();
        const CostParams sym{0.001 * u(rng), 2 * u(rng), 0.0};
        const double value = 1e4 * (1 + u(rng));
        REQUIRE(transaction_cost(z1, sigma, volume, value, sym) == transaction_cost(-z1, sigma, volume, value, sym));

        const CostParams p{0.001 * u(rng), 2 * u(rng), u(rng) - 0.5};
        const double lambda = u(rng);
        const double mixed = transaction_cost(lambda * z1 + (1 - lambda) * z2, sigma, volume, value, p);
        const double chord = lambda * transaction_cost(z1, sigma, volume, value, p) +
                             (1 - lambda) * transaction_cost(z2, sigma, volume, value, p);
        REQUIRE(mixed <= chord + 1e-12);
    }
}

TEST_CASE("transaction cost matches a scalar oracle", "[costs][oracle]") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0, 1);
    for (int trial = 0; trial < 200; ++trial) {
        const Eigen::Index n = 1 + trial % 8;
        Eigen::VectorXd sigma(n), volume(n), z(n + 1);
        for (Eigen::Index i = 0; i < n; ++i) {
            sigma(i) = 0.05 * u(rng);
            volume(i) = 1e4 + 1e8 * u(rng);
            z(i) = u(rng) - 0.5;
        }
        z(n) = -z.head(n).sum();
        const CostParams p{0.002 * u(rng), 3 * u(rng), 0.01 * (u(rng) - 0.5)};
        const double value = 1e3 + 1e6 * u(rng);
        const double expected = oracle::cost(as_vector(z), as_vector(sigma), as_vector(volume), value, p.a, p.b, p.c);
        REQUIRE_THAT(transaction_cost(z, sigma, volume, value, p), WithinAbs(expected, 1e-12));
    }
}

TEST_CASE("smoothed cost approaches the exact cost", "[costs]") {
    CostInputs in{Eigen::Vector2d(0.01, 0.02), Eigen::Vector2d(1e6, 5e6), 1e5};
    CostModel model(in, CostParams{0.0005, 1, 0.0001});
    Eigen::Vector3d z(0.05, -0.02, -0.03);
    CHECK_THAT(model.smoothed_cost(z, 1e-12), WithinAbs(model.cost(z), 1e-10));
    CHECK_THAT(model.cost(z), WithinAbs(transaction_cost(z, in, model.params()), 1e-15));

    const double h = 1e-7;
    const Eigen::VectorXd g = model.smoothed_gradient(z, 1e-6);
    for (Eigen::Index i = 0; i < 2; ++i) {
        Eigen::Vector3d up = z, down = z;
        up(i) += h;
        down(i) -= h;
        CHECK_THAT(g(i), WithinAbs((model.smoothed_cost(up, 1e-6) - model.smoothed_cost(down, 1e-6)) / (2 * h), 1e-6));
    }
    CHECK(g(2) == 0.0);
}

TEST_CASE("realized return", "[costs]") {
    PortfolioState s;
    s.weights = Eigen::Vector2d(0.5, 0.5);
    s.trade = Eigen::Vector2d(0.1, -0.1);
    CHECK_THAT(realized_return(Eigen::Vector2d(0.01, 0), s, 0.0002), WithinAbs(0.0058, 1e-15));

    s.trade.setZero();
    const Eigen::Vector2d r(0.03, 0.001);
    CHECK(realized_return(r, s, 0.0) == r.dot(s.weights));
    CHECK(realized_return(Eigen::Vector2d::Zero(), s, 0.0) == 0.0);

    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-0.05, 0.05);
    for (int trial = 0; trial < 100; ++trial) {
        Eigen::VectorXd rr(4), w(4), z(4);
        for (int i = 0; i < 4; ++i) rr(i) = u(rng), w(i) = 0.25, z(i) = u(rng);
        PortfolioState st{w, 1.0, z};
        const double phi = std::abs(u(rng)) * 0.01;
        REQUIRE_THAT(realized_return(rr, st, phi),
                     WithinAbs(oracle::realized_return(as_vector(rr), as_vector(w), as_vector(z), phi), 1e-12));
    }
}

TEST_CASE("summarize worked values", "[costs]") {
    SECTION("risk-free replication") {
        std::vector<double> rf{0.001, 0.002, 0.0015};
        const auto s = summarize(rf, rf);
        CHECK(s.excess_return == 0.0);
        CHECK(s.excess_risk == 0.0);
        CHECK_FALSE(s.sharpe.has_value());
    }
    SECTION("two points") {
        std::vector<double> r{0.02, 0.0}, rf{0.0, 0.0};
        const auto s = summarize(r, rf);
        CHECK_THAT(s.excess_return, WithinAbs(0.01, 1e-15));
        CHECK_THAT(s.excess_risk, WithinAbs(0.01, 1e-15));
        REQUIRE(s.sharpe.has_value());
        CHECK_THAT(*s.sharpe, WithinAbs(1.0, 1e-12));
    }
    SECTION("constant excess") {
        std::vector<double> r(5, 0.0125), rf(5, 0.0025);
        const auto s = summarize(r, rf);
        CHECK_THAT(s.excess_return, WithinAbs(0.01, 1e-15));
        CHECK_THAT(s.excess_risk, WithinAbs(0.0, 1e-15));
        CHECK_FALSE(s.sharpe.has_value());
    }
    SECTION("too short") {
        std::vector<double> r{0.01};
        CHECK_THROWS(summarize(r, r));
    }
}

TEST_CASE("summarize matches a two-pass oracle", "[costs][oracle]") {
    std::mt19937_64 rng(99);
    std::normal_distribution<double> noise(0.0005, 0.01);
    std::uniform_int_distribution<int> length(2, 1000);
    for (int trial = 0; trial < 100; ++trial) {
        const int T = length(rng);
        std::vector<double> r(T), rf(T), ex(T);
        for (int t = 0; t < T; ++t) {
            r[t] = noise(rng);
            rf[t] = 0.0001 * (t % 3);
            ex[t] = r[t] - rf[t];
        }
        const auto s = summarize(r, rf);
        const auto m = oracle::moments(r);
        const auto e = oracle::moments(ex);
        REQUIRE_THAT(s.mean_return, WithinAbs(m.mean, 1e-12));
        REQUIRE_THAT(s.volatility, WithinAbs(m.sd, 1e-12));
        REQUIRE_THAT(s.excess_return, WithinAbs(e.mean, 1e-12));
        REQUIRE_THAT(s.excess_risk, WithinAbs(e.sd, 1e-12));
        REQUIRE(s.sharpe.has_value());
        REQUIRE_THAT(*s.sharpe, WithinAbs(e.mean / e.sd, 1e-9));
    }
}

TEST_CASE("portfolio state invariants", "[costs]") {
    auto cash = PortfolioState::all_cash(3, 2.0);
    CHECK(cash.weights == Eigen::Vector4d(0, 0, 0, 1));
    CHECK_NOTHROW(cash.validate());

    PortfolioState bad = cash;
    bad.weights(0) = -0.1;
    bad.weights(3) = 1.1;
    CHECK_THROWS(bad.validate());

    bad = cash;
    bad.trade(0) = 0.1;
    CHECK_THROWS(bad.validate());

    bad = cash;
    bad.value = 0.0;
    CHECK_THROWS(bad.validate());
}
