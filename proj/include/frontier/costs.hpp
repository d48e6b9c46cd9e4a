#pragma once

#include <Eigen/Core>
#include <optional>
#include <span>

namespace frontier {

/// Coefficients of the spread / market-impact / asymmetry cost model.
struct CostParams {
    double a = 0.0005;  ///< half-spread plus commission, as a fraction of price
    double b = 1.0;     ///< market-impact scale
    double c = 0.0;     ///< buy/sell asymmetry

    void validate() const;
};

/// Per-asset quantities the cost model needs for one period (risky assets only).
struct CostInputs {
    Eigen::VectorXd sigma;   ///< volatility per risky asset
    Eigen::VectorXd volume;  ///< traded volume per risky asset, currency units
    double value = 1.0;      ///< portfolio value, currency units
};

/**
 * Total cost of the trade z (n+1 entries, cash last):
 *   sum_i a|z_i| + b sigma_i |z_i|^{3/2} / sqrt(V_i / v) + c z_i
 * The cash leg never contributes.
 */
double transaction_cost(const Eigen::VectorXd& z, const Eigen::VectorXd& sigma,
                        const Eigen::VectorXd& volume, double value, const CostParams& params);

inline double transaction_cost(const Eigen::VectorXd& z, const CostInputs& in,
                               const CostParams& params) {
    return transaction_cost(z, in.sigma, in.volume, in.value, params);
}

/**
 * The cost model with the impact coefficients b sigma_i / sqrt(V_i/v) folded
 * in once, for repeated evaluation inside solvers and training loops.
 */
class CostModel {
public:
    CostModel(const CostInputs& in, const CostParams& params);

    std::size_t num_risky() const { return static_cast<std::size_t>(impact_.size()); }
    const CostParams& params() const { return params_; }
    const Eigen::VectorXd& impact() const { return impact_; }

    /// Exact cost of trade z (n+1 entries).
    double cost(const Eigen::VectorXd& z) const;

    /// Cost of the smooth part only: impact and asymmetry terms.
    double smooth_cost(const Eigen::VectorXd& z) const;
    /// Gradient of smooth_cost; zero on the cash slot.
    Eigen::VectorXd smooth_gradient(const Eigen::VectorXd& z) const;

    /// Cost with |z|^{3/2} replaced by (z^2 + delta)^{3/4}, used for training.
    double smoothed_cost(const Eigen::VectorXd& z, double delta) const;
    Eigen::VectorXd smoothed_gradient(const Eigen::VectorXd& z, double delta) const;

private:
    CostParams params_;
    Eigen::VectorXd impact_;
};

/// Weights w_t before trading, trade z_t, and value v_t.
struct PortfolioState {
    Eigen::VectorXd weights;
    double value = 1.0;
    Eigen::VectorXd trade;

    /// All-cash portfolio of the given value over n risky assets.
    static PortfolioState all_cash(std::size_t num_risky, double value = 1.0);

    /// Throws on violated simplex, self-financing, or positivity invariants.
    void validate() const;
};

/// R^p = r'w + r'z - cost.
double realized_return(const Eigen::VectorXd& r, const PortfolioState& state, double cost);

struct PerformanceSummary {
    double mean_return = 0.0;
    double volatility = 0.0;
    double excess_return = 0.0;
    double excess_risk = 0.0;
    std::optional<double> sharpe;  ///< empty when excess risk is zero
};

/// Population statistics over a realized return path and its risk-free path.
PerformanceSummary summarize(std::span<const double> returns, std::span<const double> risk_free);

}  // namespace frontier
