#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "frontier/agent.hpp"
#include "frontier/costs.hpp"
#include "frontier/date.hpp"
#include "frontier/market.hpp"
#include "frontier/market_data.hpp"
#include "frontier/optimizer.hpp"
#include "frontier/sweep.hpp"

namespace frontier {

/**
 * Every setting of a run. Read from an INI file with sections
 * ([data], [split], [costs], [forecast], [risk], [solver], [training],
 * [sweep], [backtest], [synthetic], [output]); see to_config_text for the
 * complete key list.
 */
struct RunConfig {
    // [data]
    std::filesystem::path data_directory = "data";
    std::vector<std::string> assets;
    std::string risk_free_file = "risk_free.csv";
    DateRange calendar{Date(1900, 1, 1), Date(2200, 1, 1)};

    // [split]
    DateRange train;
    DateRange test;

    CostParams costs;
    ForecastConfig forecast;
    MarketOptions market;
    SolverOptions solver;
    std::size_t mpo_horizon = 2;

    // [training]
    TrainingConfig training;
    std::size_t lookback = 20;
    std::size_t kernel = 5;

    // [sweep]
    std::string grid = "small";  ///< "full", "small", or "custom"
    std::vector<double> risk_values;
    std::vector<double> trade_values;
    std::vector<std::string> families{"ew", "spo", "mpo"};
    std::size_t seeds = 10;        ///< FRONTIER seeds
    std::size_t convex_seeds = 1;  ///< forecast-noise seeds for SPO and MPO
    std::size_t jobs = 1;
    std::size_t mean_resolution = 100;

    // [backtest]
    std::string strategy = "ew";
    InvestorPreferences prefs;
    std::size_t seed_index = 0;

    // [synthetic]
    std::size_t synthetic_assets = 5;
    std::size_t synthetic_days = 1300;
    std::uint64_t synthetic_seed = 1;

    // [output]
    std::filesystem::path output_directory = "out";

    std::uint64_t master_seed = 0;

    SweepGrid sweep_grid() const;
    SweepSettings sweep_settings(const StrategyFamily& family) const;
    PanelSource panel_source() const;

    /// Checks that do not touch the file system.
    void validate() const;
};

/// Parses an INI file; unknown keys are rejected.
RunConfig load_run_config(const std::filesystem::path& path);

/// INI text of the complete configuration, loadable by load_run_config.
std::string to_config_text(const RunConfig& config);

}  // namespace frontier
