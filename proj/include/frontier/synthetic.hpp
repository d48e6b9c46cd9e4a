#pragma once

#include <cstdint>
#include <vector>

#include "frontier/date.hpp"
#include "frontier/market_data.hpp"

namespace frontier {

/**
 * Recipe for a simulated market on a Monday-to-Friday calendar.
 *
 * Closes follow geometric random walks with per-asset simple-return drift and
 * log volatility (volatility 0 gives deterministic compounding). Opens sit a
 * random intraday distance away from the close so the open/close volatility
 * proxy never vanishes.
 */
struct SyntheticMarketSpec {
    std::vector<double> drift;       ///< expected daily simple return per asset
    std::vector<double> volatility;  ///< daily log-return volatility per asset
    std::size_t num_days = 1000;
    Date start{2000, 1, 3};
    double risk_free = 0.0;
    double intraday_volatility = 0.01;
    double mean_volume = 1e7;
    double volume_dispersion = 0.2;
    double initial_price = 100.0;
    std::uint64_t seed = 1;
};

/// Trending market with `num_assets` noisy assets of similar drift.
SyntheticMarketSpec trending_market(std::size_t num_assets, std::size_t num_days, std::uint64_t seed);

PricePanel generate_market(const SyntheticMarketSpec& spec);

/// Weekdays starting at `start` (moved forward to the first weekday).
std::vector<Date> business_days(Date start, std::size_t count);

}  // namespace frontier
