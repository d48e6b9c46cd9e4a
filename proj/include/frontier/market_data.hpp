#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "frontier/date.hpp"

namespace frontier {

/**
 * Daily OHLCV series for n risky assets plus the risk-free return of the
 * cash asset, all on one trading calendar.
 *
 * Price and volume matrices are (dates x n). The cash asset carries no price
 * series; it always occupies the last slot (index n) of any weight or return
 * vector built from the panel.
 */
struct PricePanel {
    std::vector<std::string> assets;  ///< risky asset identifiers, in column order
    std::vector<Date> dates;
    Eigen::MatrixXd open;
    Eigen::MatrixXd high;
    Eigen::MatrixXd low;
    Eigen::MatrixXd close;
    Eigen::MatrixXd volume;
    Eigen::VectorXd risk_free;  ///< daily simple return of cash, per date

    std::size_t num_risky() const { return assets.size(); }
    std::size_t num_slots() const { return assets.size() + 1; }
    std::size_t num_dates() const { return dates.size(); }

    /// Index of the first date >= d (num_dates() when none).
    std::size_t index_of(const Date& d) const;

    /// Throws DataError when shapes, ordering, or price positivity are violated.
    void validate() const;
};

/// Where to find the CSV files for load_panel.
struct PanelSource {
    std::filesystem::path directory;
    /// Asset ids; each is read from `<id>.csv`. Empty means every CSV in the
    /// directory other than the risk-free file, in lexicographic order.
    std::vector<std::string> assets;
    std::string risk_free_file = "risk_free.csv";
};

/**
 * Reads one `date,open,high,low,close,volume` CSV per asset and a
 * `date,rate` risk-free CSV. The risk-free dates inside `calendar` define the
 * trading calendar; every asset must carry exactly those dates.
 */
PricePanel load_panel(const PanelSource& source, const DateRange& calendar);

/// Writes a panel back out in the layout load_panel expects.
void write_panel(const PricePanel& panel, const std::filesystem::path& directory);

/**
 * Simple and log returns. Row j holds the return earned over panel date j+1;
 * the last column is the cash asset and equals the risk-free series.
 */
struct ReturnsPanel {
    std::vector<Date> dates;
    Eigen::MatrixXd simple;
    Eigen::MatrixXd log;

    /// Return vector (n+1) earned over panel date t (t >= 1).
    Eigen::VectorXd simple_at(std::size_t t) const;
    Eigen::VectorXd log_at(std::size_t t) const;
    std::size_t num_periods() const { return dates.size(); }
};

ReturnsPanel compute_returns(const PricePanel& panel);

inline constexpr std::size_t kRollingWindow = 10;

/// Mean of rows t-window .. t-1; throws HistoryError when t < window.
Eigen::VectorXd trailing_mean(const Eigen::MatrixXd& series, std::size_t t,
                              std::size_t window = kRollingWindow);

/// 10-day trailing mean of traded volume, excluding day t.
Eigen::VectorXd rolling_volume_estimate(const PricePanel& panel, std::size_t t);

/// 10-day trailing mean of a per-date volatility series, excluding day t.
Eigen::VectorXd rolling_volatility_estimate(const Eigen::MatrixXd& sigmas, std::size_t t);

/// |log(open) - log(close)|.
double intraday_volatility_proxy(double open, double close);

/// Intraday proxy for every (date, asset) of the panel.
Eigen::MatrixXd volatility_proxy(const PricePanel& panel);

struct ForecastConfig {
    double noise_variance = 0.02;
    double returns_variance = 0.005;
    int horizon = 2;

    /// MSE-optimal shrinkage sigma_r^2 / (sigma_r^2 + sigma_eps^2).
    double alpha() const { return returns_variance / (returns_variance + noise_variance); }
    void validate() const;
};

/// alpha * (r + eps) with eps ~ N(0, noise_variance) drawn from `rng`.
Eigen::VectorXd simulate_forecast(const Eigen::VectorXd& realized, const ForecastConfig& cfg,
                                  std::mt19937_64& rng);

/**
 * Counter-based noise source: the draw for (asset, date) depends only on the
 * master seed and those two indices, so forecasts do not depend on the order
 * in which they are requested.
 */
class ForecastNoise {
public:
    ForecastNoise(std::uint64_t seed, double variance);
    double draw(std::size_t asset, std::size_t date) const;

private:
    std::uint64_t seed_;
    double stddev_;
};

/// Mixes several words into a well-spread 64-bit seed.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c = 0);

inline constexpr std::size_t kNormalizationWindow = 30;

/**
 * Divides each column by its mean over rows [train_start - window, train_start).
 * Throws HistoryError if those rows are unavailable or non-finite and
 * NumericalError ("degenerate baseline") on a zero mean.
 */
Eigen::MatrixXd normalize_features(const Eigen::MatrixXd& values, std::size_t train_start,
                                   std::size_t window = kNormalizationWindow);

/// Per-column baseline means used by normalize_features.
Eigen::VectorXd feature_baseline(const Eigen::MatrixXd& values, std::size_t train_start,
                                 std::size_t window = kNormalizationWindow);

}  // namespace frontier
