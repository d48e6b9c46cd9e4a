#include "frontier/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "frontier/error.hpp"

namespace frontier {

std::vector<Date> business_days(Date start, std::size_t count) {
    using std::chrono::Saturday;
    using std::chrono::Sunday;
    std::vector<Date> out;
    out.reserve(count);
    for (Date d = start; out.size() < count; d = d.next_day()) {
        const auto wd = d.weekday();
        if (wd != Saturday && wd != Sunday) out.push_back(d);
    }
    return out;
}

SyntheticMarketSpec trending_market(std::size_t num_assets, std::size_t num_days, std::uint64_t seed) {
    SyntheticMarketSpec spec;
    spec.num_days = num_days;
    spec.seed = seed;
    spec.risk_free = 0.0001;
    for (std::size_t i = 0; i < num_assets; ++i) {
        const double u = num_assets > 1 ? static_cast<double>(i) / static_cast<double>(num_assets - 1) : 0.0;
        spec.drift.push_back(0.0004 + 0.0006 * u);
        spec.volatility.push_back(0.008 + 0.012 * u);
    }
    return spec;
}

PricePanel generate_market(const SyntheticMarketSpec& spec) {
    const std::size_t n = spec.drift.size();
    if (n == 0 || spec.volatility.size() != n) throw ConfigError("synthetic market needs matching drift and volatility lists");
    if (spec.num_days < 2) throw ConfigError("synthetic market needs at least two days");
    if (!(spec.initial_price > 0.0) || !(spec.mean_volume > 0.0)) {
        throw ConfigError("synthetic prices and volumes must be positive");
    }

    PricePanel panel;
    for (std::size_t i = 0; i < n; ++i) panel.assets.push_back("S" + std::to_string(i));
    panel.dates = business_days(spec.start, spec.num_days);
    const auto rows = static_cast<Eigen::Index>(spec.num_days);
    const auto cols = static_cast<Eigen::Index>(n);
    panel.open.resize(rows, cols);
    panel.high.resize(rows, cols);
    panel.low.resize(rows, cols);
    panel.close.resize(rows, cols);
    panel.volume.resize(rows, cols);
    panel.risk_free = Eigen::VectorXd::Constant(rows, spec.risk_free);

    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (Eigen::Index t = 0; t < rows; ++t) {
        for (Eigen::Index i = 0; i < cols; ++i) {
            const double mu = spec.drift[static_cast<std::size_t>(i)];
            const double sd = spec.volatility[static_cast<std::size_t>(i)];
            const double shock = normal(rng);
            const double gap = normal(rng);
            const double churn = normal(rng);
            const double prev = t == 0 ? spec.initial_price : panel.close(t - 1, i);
            const double close = t == 0 ? prev : prev * (1.0 + mu) * std::exp(sd * shock - 0.5 * sd * sd);
            double open = close * std::exp(spec.intraday_volatility * gap);
            if (open == close) open = close * (1.0 + 1e-6);
            panel.close(t, i) = close;
            panel.open(t, i) = open;
            panel.high(t, i) = std::max(open, close) * (1.0 + 0.25 * spec.intraday_volatility);
            panel.low(t, i) = std::min(open, close) * (1.0 - 0.25 * spec.intraday_volatility);
            panel.volume(t, i) = spec.mean_volume * std::exp(spec.volume_dispersion * churn -
                                                            0.5 * spec.volume_dispersion * spec.volume_dispersion);
        }
    }
    panel.validate();
    return panel;
}

}  // namespace frontier
