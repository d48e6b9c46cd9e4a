#pragma once

#include <Eigen/Core>
#include <memory>
#include <random>

#include "frontier/costs.hpp"
#include "frontier/optimizer.hpp"
#include "frontier/risk_model.hpp"
#include "oracles.hpp"

namespace fixtures {

/// A random 2-risky-asset + cash trade program and its dense twin.
struct ConvexInstance {
    std::vector<Eigen::VectorXd> forecasts;
    Eigen::MatrixXd cov;  // 3 x 3 with zero cash row/column
    std::shared_ptr<const frontier::FactorRiskModel> risk;
    frontier::CostInputs inputs;
    frontier::CostParams params;
    frontier::InvestorPreferences prefs;
    frontier::PortfolioState state;

    frontier::TradeProblem problem(std::size_t horizon) const {
        return frontier::build_mpo(forecasts, state, risk, inputs, params, prefs, {}, horizon);
    }

    oracle::DenseProblem dense() const {
        oracle::DenseProblem d;
        d.forecasts = forecasts;
        d.cov = cov;
        d.sigma = {inputs.sigma(0), inputs.sigma(1)};
        d.volume = {inputs.volume(0), inputs.volume(1)};
        d.value = inputs.value;
        d.a = params.a;
        d.b = params.b;
        d.c = params.c;
        d.gamma_risk = prefs.gamma_risk;
        d.gamma_trade = prefs.gamma_trade;
        d.w = state.weights;
        return d;
    }
};

inline Eigen::VectorXd random_simplex(std::size_t m, std::mt19937_64& rng) {
    std::exponential_distribution<double> e(1.0);
    Eigen::VectorXd x(static_cast<Eigen::Index>(m));
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = e(rng);
    return x / x.sum();
}

inline ConvexInstance convex_instance(std::mt19937_64& rng, std::size_t horizon) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    ConvexInstance c;
    Eigen::MatrixXd risky = 1e-4 * (oracle::random_psd(2, rng) + 0.2 * Eigen::MatrixXd::Identity(2, 2));
    c.cov = Eigen::MatrixXd::Zero(3, 3);
    c.cov.topLeftCorner(2, 2) = risky;
    c.risk = std::make_shared<const frontier::FactorRiskModel>(
        frontier::with_cash_slot(frontier::fit_factor_model(risky, 2)));
    for (std::size_t tau = 0; tau < horizon; ++tau) {
        Eigen::VectorXd f(3);
        f << 0.004 * (2 * u(rng) - 0.5), 0.004 * (2 * u(rng) - 0.5), 0.0001;
        c.forecasts.push_back(f);
    }
    c.inputs.sigma = Eigen::Vector2d(0.005 + 0.015 * u(rng), 0.005 + 0.015 * u(rng));
    c.inputs.volume = Eigen::Vector2d(1e7 * (1 + 9 * u(rng)), 1e7 * (1 + 9 * u(rng)));
    c.inputs.value = 1e5;
    c.params = frontier::CostParams{0.0005, 1.0, 0.0};
    c.prefs = frontier::InvestorPreferences{2.0 + 48.0 * u(rng), 0.5 + 9.5 * u(rng)};
    c.state.weights = random_simplex(3, rng);
    c.state.trade = Eigen::VectorXd::Zero(3);
    return c;
}

}  // namespace fixtures
