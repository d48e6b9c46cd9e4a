#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace frontier {

enum class PolicyVariant { LogReturns, ForecastOnly, AllInputs };

std::string_view to_string(PolicyVariant variant);
/// Accepts "log-returns", "forecast-only", "all-inputs".
PolicyVariant parse_policy_variant(std::string_view text);

/**
 * Shape of a policy network. The convolution spans all n+1 asset rows of the
 * log-return window and slides over time; its `feature_maps` outputs are
 * flattened together with the optional forecasts and the weight, volume and
 * volatility features, then pass through one ReLU layer of 3(n+1) units and a
 * softmax output of n+1 units.
 */
struct PolicyArchitecture {
    PolicyVariant variant = PolicyVariant::LogReturns;
    std::size_t num_risky = 1;
    std::size_t lookback = 20;
    std::size_t kernel = 5;
    std::size_t horizon = 2;
    std::size_t feature_maps = 0;  ///< 0 selects n+1

    std::size_t slots() const { return num_risky + 1; }
    std::size_t maps() const { return feature_maps == 0 ? slots() : feature_maps; }
    bool uses_window() const { return variant != PolicyVariant::ForecastOnly; }
    bool uses_forecasts() const { return variant != PolicyVariant::LogReturns; }
    std::size_t conv_width() const { return lookback - kernel + 1; }
    std::size_t conv_outputs() const { return uses_window() ? maps() * conv_width() : 0; }
    std::size_t input_size() const;
    std::size_t hidden_size() const { return 3 * slots(); }
    std::size_t parameter_count() const;

    void validate() const;
    friend bool operator==(const PolicyArchitecture&, const PolicyArchitecture&) = default;
};

/// Observable state for one decision.
struct StateInput {
    Eigen::MatrixXd log_return_window;       ///< (n+1) x L, oldest column first
    std::vector<Eigen::VectorXd> forecasts;  ///< H vectors of length n+1
    Eigen::VectorXd weights;                 ///< current weights, n+1
    Eigen::VectorXd volume_features;         ///< normalized volume estimates, n
    Eigen::VectorXd volatility_features;     ///< normalized volatility estimates, n
};

class PolicyNetwork {
public:
    /// Intermediate values of a forward pass, consumed by backward().
    struct Tape {
        Eigen::MatrixXd window;
        Eigen::MatrixXd conv_pre;  // maps x conv_width
        Eigen::VectorXd input;
        Eigen::VectorXd hidden_pre;
        Eigen::VectorXd hidden;
        Eigen::VectorXd output;
    };

    /// All-zero parameters.
    explicit PolicyNetwork(const PolicyArchitecture& arch);
    /// Parameters drawn uniformly from [-scale, scale].
    static PolicyNetwork initialized(const PolicyArchitecture& arch, std::uint64_t seed, double scale = 0.05);

    const PolicyArchitecture& architecture() const { return arch_; }
    const Eigen::VectorXd& parameters() const { return params_; }
    Eigen::VectorXd& parameters() { return params_; }

    /// Portfolio weights for the next period (softmax, on the simplex).
    Eigen::VectorXd forward(const StateInput& state) const;
    Eigen::VectorXd forward(const StateInput& state, Tape& tape) const;

    /**
     * Reverse pass for an upstream gradient on the output weights. Adds the
     * parameter gradient into `param_grad` and returns the gradient with
     * respect to the current-weights input.
     */
    Eigen::VectorXd backward(const Tape& tape, const Eigen::VectorXd& output_grad,
                             Eigen::VectorXd& param_grad) const;

    /// Text format: one header line with the architecture, then one parameter per line.
    void save(const std::filesystem::path& path) const;
    static PolicyNetwork load(const std::filesystem::path& path);

private:
    void check_state(const StateInput& state) const;

    PolicyArchitecture arch_;
    Eigen::VectorXd params_;
};

/// Inference entry point used by backtests; same contract as forward().
inline Eigen::VectorXd act(const PolicyNetwork& net, const StateInput& state) { return net.forward(state); }

}  // namespace frontier
