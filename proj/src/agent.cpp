#include "frontier/agent.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "frontier/error.hpp"

namespace frontier {

double immediate_reward(const Eigen::VectorXd& r, const Eigen::VectorXd& w_next, const Eigen::VectorXd& w_curr,
                        const FactorRiskModel& risk, const CostModel& costs, const InvestorPreferences& prefs) {
    if (r.size() != w_next.size() || w_next.size() != w_curr.size()) {
        throw DimensionError("reward inputs must all have n+1 entries");
    }
    double reward = r.dot(w_next);
    if (prefs.gamma_trade != 0.0) reward -= prefs.gamma_trade * costs.cost(w_next - w_curr);
    if (prefs.gamma_risk != 0.0) reward -= prefs.gamma_risk * quadratic_risk(risk, w_next);
    return reward;
}

double immediate_reward(const Eigen::VectorXd& r, const Eigen::VectorXd& w_next, const Eigen::VectorXd& w_curr,
                        const FactorRiskModel& risk, const CostInputs& costs, const CostParams& params,
                        const InvestorPreferences& prefs) {
    return immediate_reward(r, w_next, w_curr, risk, CostModel(costs, params), prefs);
}

std::vector<double> discounted_returns(const std::vector<double>& rewards, double gamma) {
    std::vector<double> g(rewards.size() + 1, 0.0);
    for (std::size_t k = rewards.size(); k-- > 0;) g[k] = rewards[k] + gamma * g[k + 1];
    return g;
}

FeatureBuilder::FeatureBuilder(const MarketContext& market, std::shared_ptr<const ForecastChannel> forecasts,
                               const PolicyArchitecture& arch, std::size_t baseline_start)
    : market_(market), forecasts_(std::move(forecasts)), arch_(arch), baseline_start_(baseline_start) {
    arch_.validate();
    if (arch_.num_risky != market_.num_risky()) {
        throw DimensionError("policy architecture and market disagree on the number of assets");
    }
    if (arch_.uses_forecasts() && !forecasts_) throw ConfigError("policy variant needs a forecast channel");
    volume_base_ = feature_baseline(market_.volume_estimates(), baseline_start_);
    sigma_base_ = feature_baseline(market_.volatility_estimates(), baseline_start_);
}

std::size_t FeatureBuilder::first_valid_period() const {
    std::size_t first = kRollingWindow;
    if (arch_.uses_window()) first = std::max(first, arch_.lookback + 1);
    return first;
}

StateInput FeatureBuilder::state(std::size_t t, const Eigen::VectorXd& weights) const {
    if (t < first_valid_period() || t >= market_.num_dates()) {
        throw HistoryError("no policy state for period " + std::to_string(t));
    }
    StateInput s;
    const auto slots = static_cast<Eigen::Index>(arch_.slots());
    if (arch_.uses_window()) {
        const auto lookback = static_cast<Eigen::Index>(arch_.lookback);
        s.log_return_window.resize(slots, lookback);
        for (Eigen::Index j = 0; j < lookback; ++j) {
            s.log_return_window.col(j) = market_.period_log_return(t - arch_.lookback + static_cast<std::size_t>(j));
        }
    }
    if (arch_.uses_forecasts()) {
        const std::size_t last = market_.num_dates() - 1;
        for (std::size_t k = 0; k < arch_.horizon; ++k) s.forecasts.push_back(forecasts_->forecast(std::min(t + k, last)));
    }
    s.weights = weights;
    s.volume_features = market_.volume_estimate(t).cwiseQuotient(volume_base_);
    s.volatility_features = market_.volatility_estimate(t).cwiseQuotient(sigma_base_);
    return s;
}

std::string_view to_string(OptimizerKind kind) { return kind == OptimizerKind::Adam ? "adam" : "sgd"; }

OptimizerKind parse_optimizer_kind(std::string_view text) {
    if (text == "sgd") return OptimizerKind::Sgd;
    if (text == "adam") return OptimizerKind::Adam;
    throw ConfigError("unknown optimizer '" + std::string(text) + "'");
}

void TrainingConfig::validate() const {
    if (episode_length < 1) throw ConfigError("episode length must be >= 1");
    if (!(discount >= 0.0 && discount <= 1.0)) throw ConfigError("discount must lie in [0, 1]");
    if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
    if (!(clip_norm > 0.0)) throw ConfigError("gradient clip norm must be positive");
    if (!(init_scale >= 0.0)) throw ConfigError("initialization scale must be non-negative");
    if (!(smoothing_delta > 0.0)) throw ConfigError("smoothing delta must be positive");
    if (!(portfolio_value > 0.0)) throw ConfigError("portfolio value must be positive");
    if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0 && adam_beta2 >= 0.0 && adam_beta2 < 1.0 && adam_epsilon > 0.0)) {
        throw ConfigError("invalid Adam coefficients");
    }
}

EpisodeOutcome run_episode(const PolicyNetwork& net, const TrainingData& data, const InvestorPreferences& prefs,
                           const TrainingConfig& cfg, const Episode& episode, Eigen::VectorXd* gradient) {
    const std::size_t T = cfg.episode_length;
    if (episode.start < data.first_period || episode.start + T > data.last_period) {
        throw HistoryError("episode starting at period " + std::to_string(episode.start) + " leaves the training range");
    }
    const auto& market = data.market;
    const double gt = prefs.gamma_trade;
    const double gr = prefs.gamma_risk;
    const double delta = cfg.smoothing_delta;

    std::vector<PolicyNetwork::Tape> tapes(gradient ? T : 1);
    std::vector<Eigen::VectorXd> w(T + 1), x(T), r(T);
    std::vector<CostModel> costs;
    std::vector<std::shared_ptr<const FactorRiskModel>> risks(T);
    costs.reserve(T);

    EpisodeOutcome out;
    out.rewards.resize(T);
    w[0] = episode.initial_weights;
    for (std::size_t j = 0; j < T; ++j) {
        const std::size_t t = episode.start + j;
        auto& tape = tapes[gradient ? j : 0];
        x[j] = net.forward(data.features.state(t, w[j]), tape);
        r[j] = market.period_return(t);
        costs.emplace_back(market.realized_costs(t, cfg.portfolio_value), data.costs);

        double reward = r[j].dot(x[j]);
        if (gt != 0.0) reward -= gt * costs[j].smoothed_cost(x[j] - w[j], delta);
        if (gr != 0.0) {
            risks[j] = market.risk_model(t);
            reward -= gr * quadratic_risk(*risks[j], x[j]);
        }
        out.rewards[j] = reward;
        w[j + 1] = x[j].cwiseProduct((1.0 + r[j].array()).matrix()) / (1.0 + r[j].dot(x[j]));
    }
    out.returns = discounted_returns(out.rewards, cfg.discount);
    double total = 0.0;
    for (std::size_t j = 0; j < T; ++j) total += out.returns[j];
    out.objective = total / static_cast<double>(T);

    if (!gradient) return out;

    gradient->setZero(net.parameters().size());
    std::vector<double> weight(T);
    double partial = 0.0, power = 1.0;
    for (std::size_t j = 0; j < T; ++j) {
        partial += power;
        power *= cfg.discount;
        weight[j] = partial / static_cast<double>(T);
    }

    Eigen::VectorXd dw_next = Eigen::VectorXd::Zero(w[0].size());
    for (std::size_t j = T; j-- > 0;) {
        const double cj = weight[j];
        Eigen::VectorXd dx = cj * r[j];
        Eigen::VectorXd cost_grad;
        if (gt != 0.0) {
            cost_grad = costs[j].smoothed_gradient(x[j] - w[j], delta);
            dx -= (cj * gt) * cost_grad;
        }
        if (gr != 0.0) dx -= (cj * gr) * quadratic_risk_gradient(*risks[j], x[j]);

        const Eigen::VectorXd growth = (1.0 + r[j].array()).matrix();
        const double s = 1.0 + r[j].dot(x[j]);
        const double mixed = dw_next.dot(x[j].cwiseProduct(growth));
        dx += growth.cwiseProduct(dw_next) / s - r[j] * (mixed / (s * s));

        dw_next = net.backward(tapes[j], dx, *gradient);
        if (gt != 0.0) dw_next += (cj * gt) * cost_grad;
    }
    return out;
}

PolicyNetwork train(PolicyNetwork net, const TrainingData& data, const InvestorPreferences& prefs,
                    const TrainingConfig& cfg, std::uint64_t seed, const TrainingMonitor& monitor) {
    cfg.validate();
    prefs.validate();
    if (cfg.episodes == 0) return net;

    const std::size_t T = cfg.episode_length;
    if (data.last_period < data.first_period + T) {
        throw HistoryError("training range is shorter than one episode");
    }
    if (data.first_period < data.features.first_valid_period()) {
        throw HistoryError("training range starts before the policy inputs are available");
    }
    if (prefs.gamma_risk != 0.0 && data.first_period < data.market.first_risk_period()) {
        throw HistoryError("training range starts before the covariance window is filled");
    }

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> start_dist(data.first_period, data.last_period - T);
    std::exponential_distribution<double> unit_exp(1.0);
    const auto slots = static_cast<Eigen::Index>(data.market.num_slots());
    const auto dim = net.parameters().size();

    Eigen::VectorXd grad(dim);
    Eigen::VectorXd m = Eigen::VectorXd::Zero(dim);
    Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
    double b1t = 1.0, b2t = 1.0;

    for (std::size_t e = 0; e < cfg.episodes; ++e) {
        Episode episode{start_dist(rng), Eigen::VectorXd(slots)};
        for (Eigen::Index i = 0; i < slots; ++i) episode.initial_weights(i) = unit_exp(rng);
        episode.initial_weights /= episode.initial_weights.sum();

        const EpisodeOutcome outcome = run_episode(net, data, prefs, cfg, episode, &grad);
        if (!std::isfinite(outcome.objective) || !grad.allFinite()) {
            throw NumericalError("non-finite training objective at episode " + std::to_string(e) +
                                 " (start period " + std::to_string(episode.start) + ")");
        }
        const double norm = grad.norm();
        if (norm > cfg.clip_norm) grad *= cfg.clip_norm / norm;

        auto& p = net.parameters();
        if (cfg.optimizer == OptimizerKind::Sgd) {
            p += cfg.learning_rate * grad;
        } else {
            m = cfg.adam_beta1 * m + (1.0 - cfg.adam_beta1) * grad;
            v = cfg.adam_beta2 * v + (1.0 - cfg.adam_beta2) * grad.cwiseAbs2();
            b1t *= cfg.adam_beta1;
            b2t *= cfg.adam_beta2;
            const double lr = cfg.learning_rate * std::sqrt(1.0 - b2t) / (1.0 - b1t);
            p.array() += lr * m.array() / (v.array().sqrt() + cfg.adam_epsilon);
        }
        if (!p.allFinite()) throw NumericalError("parameters diverged at episode " + std::to_string(e));
        if (monitor) monitor(e, outcome.objective);
    }
    return net;
}

PolicyStrategy::PolicyStrategy(std::shared_ptr<const PolicyNetwork> net, std::shared_ptr<const FeatureBuilder> features)
    : net_(std::move(net)), features_(std::move(features)) {
    if (!net_ || !features_) throw ConfigError("policy strategy needs a network and a feature builder");
    if (!(net_->architecture() == features_->architecture())) {
        throw DimensionError("network and feature builder architectures differ");
    }
}

std::string PolicyStrategy::name() const {
    return "frontier-" + std::string(to_string(net_->architecture().variant));
}

Eigen::VectorXd PolicyStrategy::decide(const DecisionContext& ctx) {
    return act(*net_, features_->state(ctx.period, ctx.state.weights));
}

}  // namespace frontier
