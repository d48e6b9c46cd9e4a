#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "frontier/error.hpp"
#include "frontier/risk_model.hpp"
#include "support/oracles.hpp"

using namespace frontier;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;

namespace {

ReturnsPanel panel_from(const Eigen::MatrixXd& risky) {
    ReturnsPanel r;
    r.simple.resize(risky.rows(), risky.cols() + 1);
    r.simple.leftCols(risky.cols()) = risky;
    r.simple.col(risky.cols()).setZero();
    r.log = r.simple.array().log1p().matrix();
    for (Eigen::Index t = 0; t < risky.rows(); ++t) r.dates.push_back(Date(2000, 1, 3));
    return r;
}

double dense_quadratic(const Eigen::MatrixXd& cov, const Eigen::VectorXd& h) {
    double s = 0;
    for (Eigen::Index i = 0; i < h.size(); ++i)
        for (Eigen::Index j = 0; j < h.size(); ++j) s += h(i) * cov(i, j) * h(j);
    return s;
}

}  // namespace

TEST_CASE("trailing covariance", "[risk-model]") {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> normal(0, 0.01);

    SECTION("identical series are perfectly correlated") {
        Eigen::MatrixXd x(50, 2);
        for (Eigen::Index t = 0; t < 50; ++t) x(t, 0) = x(t, 1) = normal(rng);
        const auto cov = trailing_covariance(panel_from(x), 51, 50);
        CHECK_THAT(cov(0, 1), WithinAbs(cov(0, 0), 1e-18));
        CHECK(cov.row(2).isZero(0));
        CHECK(cov.col(2).isZero(0));
    }
    SECTION("constant returns give the zero matrix") {
        const auto cov = trailing_covariance(panel_from(Eigen::MatrixXd::Constant(30, 3, 0.002)), 31, 30);
        CHECK(cov.isZero(1e-20));
    }
    SECTION("independent series have near-zero covariance") {
        const Eigen::Index T = 10000;
        Eigen::MatrixXd x(T, 3);
        for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = normal(rng);
        const auto cov = trailing_covariance(panel_from(x), T + 1, T);
        const double se = 0.01 * 0.01 / std::sqrt(static_cast<double>(T));
        for (int i = 0; i < 3; ++i)
            for (int j = i + 1; j < 3; ++j) CHECK(std::abs(cov(i, j)) < 3 * se);
    }
    SECTION("matches the dense oracle and excludes day t") {
        Eigen::MatrixXd x(40, 3);
        for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = normal(rng);
        const auto cov = trailing_covariance(panel_from(x), 31, 20);
        const auto expected = oracle::covariance(x.middleRows(10, 20));
        CHECK((cov.topLeftCorner(3, 3) - expected).cwiseAbs().maxCoeff() < 1e-15);
    }
    SECTION("insufficient history") {
        CHECK_THROWS_AS(trailing_covariance(panel_from(Eigen::MatrixXd::Zero(30, 2)), 20, 25), HistoryError);
    }
}

TEST_CASE("factor model fits", "[risk-model]") {
    std::mt19937_64 rng(5);

    SECTION("full rank reconstructs exactly") {
        for (int trial = 0; trial < 20; ++trial) {
            const Eigen::MatrixXd cov = oracle::random_psd(6, rng);
            const auto m = fit_factor_model(cov, 6);
            REQUIRE((m.covariance() - cov).cwiseAbs().maxCoeff() < 1e-10);
            REQUIRE(m.idiosyncratic.cwiseAbs().maxCoeff() < 1e-10);
        }
    }
    SECTION("identity with one factor keeps the trace and diagonal") {
        const auto m = fit_factor_model(Eigen::MatrixXd::Identity(4, 4), 1);
        const auto s = m.covariance();
        CHECK_THAT(s.trace(), WithinAbs(4.0, 1e-10));
        CHECK((s.diagonal() - Eigen::VectorXd::Ones(4)).cwiseAbs().maxCoeff() < 1e-10);
    }
    SECTION("eigenvalues match a Jacobi oracle") {
        const Eigen::MatrixXd cov = oracle::random_psd(5, rng);
        Eigen::VectorXd values;
        Eigen::MatrixXd vectors;
        oracle::jacobi_eigen(cov, values, vectors);
        std::vector<double> sorted(values.data(), values.data() + values.size());
        std::sort(sorted.rbegin(), sorted.rend());
        const auto m = fit_factor_model(cov, 3);
        for (int j = 0; j < 3; ++j) CHECK_THAT(m.factor_variances(j), WithinAbs(sorted[j], 1e-10));
    }
    SECTION("diagonal preserved for low-rank fits") {
        for (int trial = 0; trial < 100; ++trial) {
            const Eigen::MatrixXd cov = oracle::random_psd(10, rng, 1 + trial % 10);
            const auto m = fit_factor_model(cov, 1 + trial % 9);
            REQUIRE((m.covariance().diagonal() - cov.diagonal()).cwiseAbs().maxCoeff() < 1e-10);
        }
    }
    SECTION("errors") {
        CHECK_THROWS_AS(fit_factor_model(Eigen::MatrixXd::Identity(3, 3), 0), ConfigError);
        CHECK_THROWS_AS(fit_factor_model(Eigen::MatrixXd::Identity(3, 3), 4), ConfigError);
        Eigen::Matrix2d asym;
        asym << 1, 0.5, 0.1, 1;
        CHECK_THROWS_WITH(fit_factor_model(asym, 1), ContainsSubstring("asymmetric"));
        Eigen::Matrix2d neg;
        neg << 1, 2, 2, 1;
        CHECK_THROWS_WITH(fit_factor_model(neg, 1), ContainsSubstring("positive semidefinite"));
    }
    SECTION("default factor count") {
        CHECK(default_factor_count(1) == 1);
        CHECK(default_factor_count(5) == 4);
        CHECK(default_factor_count(30) == 15);
    }
}

TEST_CASE("quadratic risk through the factor structure", "[risk-model]") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(-1, 1);
    const Eigen::MatrixXd risky = oracle::random_psd(4, rng);
    const auto model = with_cash_slot(fit_factor_model(risky, 2));
    const Eigen::MatrixXd dense = model.covariance();

    Eigen::VectorXd cash = Eigen::VectorXd::Zero(5);
    cash(4) = 1;
    CHECK(quadratic_risk(model, cash) == 0.0);
    for (int i = 0; i < 4; ++i) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(5);
        e(i) = 1;
        CHECK_THAT(quadratic_risk(model, e), WithinAbs(dense(i, i), 1e-12));
        CHECK_THAT(dense(i, i), WithinAbs(risky(i, i), 1e-10));
    }
    for (int trial = 0; trial < 100; ++trial) {
        Eigen::VectorXd h(5);
        for (int i = 0; i < 5; ++i) h(i) = u(rng);
        const double q = quadratic_risk(model, h);
        REQUIRE(q >= -1e-10);
        REQUIRE_THAT(q, WithinAbs(dense_quadratic(dense, h), 1e-10));
        REQUIRE((quadratic_risk_gradient(model, h) - 2 * dense * h).cwiseAbs().maxCoeff() < 1e-10);
        REQUIRE((covariance_times(model, h) - dense * h).cwiseAbs().maxCoeff() < 1e-10);
    }
}
