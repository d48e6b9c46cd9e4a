#pragma once

#include <Eigen/Core>
#include <memory>
#include <optional>
#include <vector>

#include "frontier/costs.hpp"
#include "frontier/risk_model.hpp"

namespace frontier {

/// Risk and trading aversion of one investor.
struct InvestorPreferences {
    double gamma_risk = 1.0;
    double gamma_trade = 1.0;

    void validate() const;
    friend bool operator==(const InvestorPreferences&, const InvestorPreferences&) = default;
};

/// Feasible-set switches. Only the long-only, fully-invested, self-financing
/// profile is supported.
struct ConstraintSet {
    bool long_only = true;
    bool fully_invested = true;
    bool self_financing = true;
};

/// One period of a planning horizon: forecast, risk estimate, cost estimate.
struct PlanningPeriod {
    Eigen::VectorXd forecast;  ///< n+1 expected returns, cash last
    std::shared_ptr<const FactorRiskModel> risk;
    CostModel costs;
};

/**
 * Concave trade-selection program over H periods:
 *
 *   max sum_tau  f_tau' x_tau - g_trade * cost_tau(x_tau - x_{tau-1}) - g_risk * x_tau' S_tau x_tau
 *   s.t. x_tau on the probability simplex, x_0 = current weights
 *
 * x_tau = w_tau + z_tau are post-trade holdings. H = 1 is the single-period
 * program; only the first trade of a longer plan is meant to be executed.
 */
class TradeProblem {
public:
    TradeProblem(Eigen::VectorXd current_weights, std::vector<PlanningPeriod> periods,
                 InvestorPreferences prefs, ConstraintSet constraints = {});

    std::size_t horizon() const { return periods_.size(); }
    std::size_t num_slots() const { return static_cast<std::size_t>(weights_.size()); }
    const Eigen::VectorXd& current_weights() const { return weights_; }
    const InvestorPreferences& preferences() const { return prefs_; }
    const std::vector<PlanningPeriod>& periods() const { return periods_; }

    /// Objective at post-trade holdings x_1..x_H.
    double objective(const std::vector<Eigen::VectorXd>& holdings) const;

    /// Objective without the a|z| spread term.
    double smooth_objective(const std::vector<Eigen::VectorXd>& holdings) const;
    std::vector<Eigen::VectorXd> smooth_gradient(const std::vector<Eigen::VectorXd>& holdings) const;
    /// g_trade * a * sum |z| over risky slots.
    double spread_penalty(const std::vector<Eigen::VectorXd>& holdings) const;

private:
    Eigen::VectorXd weights_;
    std::vector<PlanningPeriod> periods_;
    InvestorPreferences prefs_;
};

/// Single-period program for the next rebalance.
TradeProblem build_spo(const Eigen::VectorXd& forecast, const PortfolioState& state,
                       std::shared_ptr<const FactorRiskModel> risk, const CostInputs& cost_estimates,
                       const CostParams& params, const InvestorPreferences& prefs,
                       const ConstraintSet& constraints = {});

/// H-period program; `forecasts[tau]` is the forecast for period t + tau.
TradeProblem build_mpo(const std::vector<Eigen::VectorXd>& forecasts, const PortfolioState& state,
                       std::shared_ptr<const FactorRiskModel> risk, const CostInputs& cost_estimates,
                       const CostParams& params, const InvestorPreferences& prefs,
                       const ConstraintSet& constraints, std::size_t horizon);

struct SolverOptions {
    double tol = 1e-7;
    int max_iter = 10000;
};

struct TradePlan {
    std::vector<Eigen::VectorXd> trades;    ///< z_t .. z_{t+H-1}
    std::vector<Eigen::VectorXd> holdings;  ///< w_tau + z_tau for each period
    double objective_value = 0.0;
    int iterations = 0;
    bool converged = false;
    std::vector<double> objective_trace;  ///< objective after each accepted iterate, starting point first

    const Eigen::VectorXd& next_weights() const { return holdings.front(); }
};

/**
 * Proximal-gradient ascent with backtracking. The spread term a|z| is handled
 * exactly in the proximal step; the impact term is smooth. Every accepted
 * iterate is feasible and does not lower the objective.
 */
TradePlan solve(const TradeProblem& problem, const SolverOptions& options = {},
                const std::optional<std::vector<Eigen::VectorXd>>& start = std::nullopt);

/// Euclidean projection onto the probability simplex.
Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& v);

namespace detail {

/// argmin_x 1/2|x - y|^2 + sum_i kappa_i |x_i - w_i| over the simplex, exactly.
Eigen::VectorXd prox_single_period(const Eigen::VectorXd& y, const Eigen::VectorXd& w,
                                   const Eigen::VectorXd& kappa);

/**
 * Chained version over H periods: kappa_i |x_tau,i - x_{tau-1,i}|, x_0 = w,
 * each x_tau on the simplex. `multipliers` holds the H budget multipliers
 * and carries a warm start between calls.
 */
std::vector<Eigen::VectorXd> prox_multi_period(const std::vector<Eigen::VectorXd>& y,
                                               const Eigen::VectorXd& w, const Eigen::VectorXd& kappa,
                                               Eigen::VectorXd& multipliers);

}  // namespace detail

}  // namespace frontier
