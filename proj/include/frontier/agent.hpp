#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "frontier/backtest.hpp"
#include "frontier/costs.hpp"
#include "frontier/market.hpp"
#include "frontier/optimizer.hpp"
#include "frontier/policy.hpp"
#include "frontier/risk_model.hpp"

namespace frontier {

/// R = r'x - g_trade * cost(x - w) - g_risk * x' S x, with the exact cost.
double immediate_reward(const Eigen::VectorXd& r, const Eigen::VectorXd& w_next, const Eigen::VectorXd& w_curr,
                        const FactorRiskModel& risk, const CostModel& costs, const InvestorPreferences& prefs);

double immediate_reward(const Eigen::VectorXd& r, const Eigen::VectorXd& w_next, const Eigen::VectorXd& w_curr,
                        const FactorRiskModel& risk, const CostInputs& costs, const CostParams& params,
                        const InvestorPreferences& prefs);

/**
 * G_t = sum_{k=t+1}^{T} gamma^{k-t-1} R_k for rewards R_1..R_T. The result
 * has T+1 entries; the last is the empty sum 0.
 */
std::vector<double> discounted_returns(const std::vector<double>& rewards, double gamma);

/**
 * Builds network inputs for period t from data up to t-1 and the forecast
 * channel. Volume and volatility estimates are divided by their means over
 * the 30 days before `baseline_start`.
 */
class FeatureBuilder {
public:
    FeatureBuilder(const MarketContext& market, std::shared_ptr<const ForecastChannel> forecasts,
                   const PolicyArchitecture& arch, std::size_t baseline_start);

    const PolicyArchitecture& architecture() const { return arch_; }
    StateInput state(std::size_t t, const Eigen::VectorXd& weights) const;
    /// Smallest period for which state() has all of its inputs.
    std::size_t first_valid_period() const;

private:
    const MarketContext& market_;
    std::shared_ptr<const ForecastChannel> forecasts_;
    PolicyArchitecture arch_;
    std::size_t baseline_start_;
    Eigen::VectorXd volume_base_;
    Eigen::VectorXd sigma_base_;
};

enum class OptimizerKind { Sgd, Adam };

std::string_view to_string(OptimizerKind kind);
OptimizerKind parse_optimizer_kind(std::string_view text);

struct TrainingConfig {
    std::size_t episodes = 5000;
    std::size_t episode_length = 30;
    double discount = 0.99;
    OptimizerKind optimizer = OptimizerKind::Sgd;
    double learning_rate = 1e-3;
    double clip_norm = 10.0;
    double init_scale = 0.05;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_epsilon = 1e-8;
    double smoothing_delta = 1e-12;
    double portfolio_value = 1.0;  ///< value used to scale market impact during training

    void validate() const;
};

/// Everything an episode needs: the market, the feature builder, and the
/// half-open range of periods episodes are drawn from.
struct TrainingData {
    const MarketContext& market;
    const FeatureBuilder& features;
    std::size_t first_period;
    std::size_t last_period;
    CostParams costs;
};

/// A fixed episode: start period and initial weights.
struct Episode {
    std::size_t start;
    Eigen::VectorXd initial_weights;
};

struct EpisodeOutcome {
    std::vector<double> rewards;  ///< R_1..R_T
    std::vector<double> returns;  ///< G_0..G_T
    double objective = 0.0;       ///< mean of G_0..G_{T-1}
};

/**
 * Rolls the policy through one episode. The environment replays historical
 * returns; holdings drift with them between steps. Rewards use the smoothed
 * impact term. When `gradient` is non-null the exact gradient of the
 * objective with respect to the network parameters is written into it.
 */
EpisodeOutcome run_episode(const PolicyNetwork& net, const TrainingData& data, const InvestorPreferences& prefs,
                           const TrainingConfig& cfg, const Episode& episode, Eigen::VectorXd* gradient = nullptr);

/// Per-episode progress hook: episode index and objective.
using TrainingMonitor = std::function<void(std::size_t, double)>;

/**
 * Gradient ascent on the mean discounted reward, one update per sampled
 * episode. Starts are uniform over the training range; initial weights are
 * uniform on the simplex. Deterministic in `seed`.
 */
PolicyNetwork train(PolicyNetwork net, const TrainingData& data, const InvestorPreferences& prefs,
                    const TrainingConfig& cfg, std::uint64_t seed, const TrainingMonitor& monitor = {});

/// Runs a trained network inside the backtest loop.
class PolicyStrategy : public Strategy {
public:
    PolicyStrategy(std::shared_ptr<const PolicyNetwork> net, std::shared_ptr<const FeatureBuilder> features);

    std::string name() const override;
    Eigen::VectorXd decide(const DecisionContext& ctx) override;
    std::size_t first_valid_period(const MarketContext&) const override { return features_->first_valid_period(); }
    const PolicyNetwork& network() const { return *net_; }

private:
    std::shared_ptr<const PolicyNetwork> net_;
    std::shared_ptr<const FeatureBuilder> features_;
};

}  // namespace frontier
