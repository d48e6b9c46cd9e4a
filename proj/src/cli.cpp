#include "frontier/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <map>
#include <ostream>

#include "frontier/backtest.hpp"
#include "frontier/error.hpp"
#include "frontier/report.hpp"
#include "frontier/synthetic.hpp"

namespace frontier {

namespace fs = std::filesystem;

namespace {

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    out << text;
}

void write_config_copy(const RunConfig& config) {
    write_text(config.output_directory / "config.ini",
               "# master seed " + std::to_string(config.master_seed) + "\n" + to_config_text(config));
}

std::uint64_t master_seed_from_env() {
    const char* text = std::getenv("FRONTIER_SEED");
    if (text == nullptr || *text == '\0') return 0;
    const std::string s(text);
    std::uint64_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw ConfigError("FRONTIER_SEED must be a non-negative integer, got '" + s + "'");
    }
    return v;
}

std::string format_summary(const std::string& label, const PerformanceSummary& s) {
    return "strategy = " + label + "\nmean_return = " + format_double(s.mean_return) +
           "\nvolatility = " + format_double(s.volatility) + "\nexcess_return = " + format_double(s.excess_return) +
           "\nexcess_risk = " + format_double(s.excess_risk) +
           "\nsharpe = " + (s.sharpe ? format_double(*s.sharpe) : std::string("undefined")) + "\n";
}

std::string point_label(const FrontierPoint& p) { return p.variant.empty() ? p.family : p.family + "-" + p.variant; }

/// Pareto CSV, mean-frontier CSV (two or more seeds), and the chart for a set of labelled point groups.
void write_reports(const std::map<std::string, std::vector<FrontierPoint>>& groups, const RunConfig& config,
                   std::ostream& out) {
    std::vector<ChartSeries> chart;
    for (const auto& [label, points] : groups) {
        if (points.empty()) continue;
        const auto pareto = pareto_filter(points);
        write_frontier_csv(pareto, config.output_directory / (label + "_pareto.csv"));
        const auto per_seed = frontiers_by_seed(points);
        if (per_seed.size() >= 2) {
            try {
                write_mean_frontier_csv(label, mean_frontier(per_seed, config.mean_resolution),
                                        config.output_directory / (label + "_mean.csv"));
            } catch (const NumericalError& e) {
                out << label << ": no mean frontier (" << e.what() << ")\n";
            }
        }
        chart.push_back(ChartSeries{label, points, pareto});
    }
    write_text(config.output_directory / "frontier.svg", render_frontier_svg(chart));
}

MarketContext load_market(const RunConfig& config) {
    return MarketContext(load_panel(config.panel_source(), config.calendar), config.market);
}

}  // namespace

int cmd_validate(const RunConfig& config, std::ostream& out) {
    std::vector<std::string> problems;
    try {
        config.validate();
    } catch (const std::exception& e) {
        problems.push_back(std::string("config: ") + e.what());
    }
    try {
        const auto grid = config.sweep_grid();
        out << "grid: " << grid.size() << " preference pairs\n";
    } catch (const std::exception& e) {
        problems.push_back(std::string("grid: ") + e.what());
    }

    try {
        const MarketContext market = load_market(config);
        out << "data: " << market.num_risky() << " assets, " << market.num_dates() << " dates\n";
        const auto [train_first, train_last] = period_span(market, config.train);
        const auto [test_first, test_last] = period_span(market, config.test);
        out << "train: " << train_last - train_first << " periods, test: " << test_last - test_first << " periods\n";
        auto need = [&](const std::string& what, std::size_t required, std::size_t have) {
            if (have < required) {
                problems.push_back("insufficient warm-up: " + what + " needs " + std::to_string(required) +
                                   " days of history, has " + std::to_string(have));
            }
        };
        for (const auto& label : config.families) {
            const auto family = StrategyFamily::parse(label);
            if (family.kind == StrategyFamily::Kind::Spo || family.kind == StrategyFamily::Kind::Mpo) {
                need(label + " on the test range", std::max(market.first_risk_period(), kRollingWindow), test_first);
            }
            if (family.kind == StrategyFamily::Kind::Frontier) {
                PolicyArchitecture arch;
                arch.variant = family.variant;
                arch.num_risky = market.num_risky();
                arch.lookback = config.lookback;
                arch.kernel = config.kernel;
                const std::size_t inputs = std::max(kRollingWindow, arch.lookback + 1);
                need(label + " normalization baseline", kRollingWindow + kNormalizationWindow, train_first);
                need(label + " inputs on the training range", inputs, train_first);
                need(label + " risk model on the training range", market.first_risk_period(), train_first);
                if (train_last - train_first < config.training.episode_length) {
                    problems.push_back(label + ": training range is shorter than one episode");
                }
            }
        }
    } catch (const std::exception& e) {
        problems.push_back(std::string("data: ") + e.what());
    }

    for (const auto& p : problems) out << p << '\n';
    if (problems.empty()) out << "OK\n";
    return problems.empty() ? 0 : 1;
}

int cmd_backtest(const RunConfig& config, std::ostream& out) {
    config.validate();
    const MarketContext market = load_market(config);
    const auto family = StrategyFamily::parse(config.strategy);
    const auto settings = config.sweep_settings(family);
    std::shared_ptr<const ForecastChannel> channel;
    if (family.stochastic()) {
        channel = std::make_shared<const ForecastChannel>(market, config.forecast,
                                                          forecast_seed(config.master_seed, config.seed_index));
    }
    auto strategy = prepare_strategy(family, market, settings, config.prefs, channel,
                                     training_seed(config.master_seed, config.seed_index, 0));
    const BacktestResult result = run_backtest(*strategy, market, config.test, config.costs);

    fs::create_directories(config.output_directory);
    write_config_copy(config);
    write_backtest_csv(result, config.output_directory / "backtest.csv");
    const std::string summary = format_summary(family.label(), result.summary);
    write_text(config.output_directory / "summary.txt", summary);
    if (const auto* policy = dynamic_cast<const PolicyStrategy*>(strategy.get())) {
        policy->network().save(config.output_directory / "policy.txt");
    }
    out << summary;
    return 0;
}

int cmd_sweep(const RunConfig& config, std::ostream& out, std::ostream& err) {
    config.validate();
    const MarketContext market = load_market(config);
    const SweepGrid grid = config.sweep_grid();
    fs::create_directories(config.output_directory);
    write_config_copy(config);

    std::map<std::string, std::vector<FrontierPoint>> groups;
    std::vector<std::string> failures;
    for (const auto& label : config.families) {
        const auto family = StrategyFamily::parse(label);
        const auto outcome = run_sweep(family, market, grid, config.sweep_settings(family));
        write_frontier_csv(outcome.points, config.output_directory / (family.label() + "_frontier.csv"));
        out << family.label() << ": " << outcome.points.size() << " points\n";
        for (const auto& f : outcome.failures) {
            failures.push_back(family.label() + "," + format_double(f.prefs.gamma_risk) + "," +
                               format_double(f.prefs.gamma_trade) + "," + std::to_string(f.seed) + "," + f.message);
        }
        groups[family.label()] = outcome.points;
    }
    write_reports(groups, config, out);

    if (!failures.empty()) {
        std::string text = "family,gamma_risk,gamma_trade,seed,message\n";
        for (const auto& f : failures) text += f + "\n";
        write_text(config.output_directory / "failures.txt", text);
        err << failures.size() << " sweep task(s) failed:\n";
        for (const auto& f : failures) err << "  " << f << '\n';
        return 1;
    }
    return 0;
}

int cmd_frontier(const RunConfig& config, const std::vector<std::string>& inputs, std::ostream& out) {
    std::vector<fs::path> files(inputs.begin(), inputs.end());
    if (files.empty()) {
        if (fs::is_directory(config.output_directory)) {
            for (const auto& entry : fs::directory_iterator(config.output_directory)) {
                const std::string name = entry.path().filename().string();
                constexpr std::string_view suffix = "_frontier.csv";
                if (name.size() > suffix.size() && name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0) {
                    files.push_back(entry.path());
                }
            }
        }
        std::sort(files.begin(), files.end());
    }
    if (files.empty()) throw ConfigError("no frontier CSV files given or found in " + config.output_directory.string());

    std::map<std::string, std::vector<FrontierPoint>> groups;
    for (const auto& file : files) {
        for (auto& p : read_frontier_csv(file)) groups[point_label(p)].push_back(std::move(p));
    }
    fs::create_directories(config.output_directory);
    write_reports(groups, config, out);
    for (const auto& [label, points] : groups) out << label << ": " << points.size() << " points\n";
    return 0;
}

int cmd_synth(const RunConfig& config, std::ostream& out) {
    const auto spec = trending_market(config.synthetic_assets, config.synthetic_days, config.synthetic_seed);
    const PricePanel panel = generate_market(spec);
    fs::create_directories(config.output_directory);
    write_panel(panel, config.output_directory);

    const std::size_t days = panel.num_dates();
    const std::size_t warmup = std::min<std::size_t>(kCovarianceWindow + 40, days / 2);
    const std::size_t train_end = warmup + (days - warmup) * 2 / 3;
    RunConfig sample;
    sample.data_directory = ".";
    sample.assets = panel.assets;
    sample.train = DateRange{panel.dates[warmup], panel.dates[train_end]};
    sample.test = DateRange{panel.dates[train_end], panel.dates.back().next_day()};
    sample.output_directory = "out";
    write_text(config.output_directory / "config.ini", to_config_text(sample));
    out << "wrote " << panel.num_risky() << " assets x " << days << " days to " << config.output_directory.string()
        << "\n";
    return 0;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Risk-return frontiers for convex and learned portfolio strategies", "frontier"};
    app.fallthrough();
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> families;
    std::size_t seeds = 0;
    std::size_t jobs = 0;
    std::string out_dir;
    std::string grid;
    app.add_option("--config", config_path, "INI configuration file");
    app.add_option("--families", families, "strategy families, e.g. ew,spo,mpo,frontier-log-returns")->delimiter(',');
    app.add_option("--seeds", seeds, "number of seeds per stochastic family");
    app.add_option("--jobs", jobs, "maximum number of concurrent sweep tasks");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--grid", grid, "preference grid")->check(CLI::IsMember({"full", "small", "custom"}));

    auto* validate = app.add_subcommand("validate", "check data, warm-up, and grid without running anything");
    auto* backtest = app.add_subcommand("backtest", "backtest one strategy over the test range");
    auto* sweep = app.add_subcommand("sweep", "run the preference grid and write frontier reports");
    auto* frontier = app.add_subcommand("frontier", "recompute Pareto and mean frontiers from stored points");
    auto* synth = app.add_subcommand("synth", "write a synthetic market and a matching config");
    std::vector<std::string> inputs;
    frontier->add_option("inputs", inputs, "frontier CSV files (default: *_frontier.csv in the output directory)");

    std::vector<const char*> argv{"frontier"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        RunConfig config;
        if (!config_path.empty()) {
            config = load_run_config(config_path);
            if (config.data_directory.is_relative()) {
                config.data_directory = fs::path(config_path).parent_path() / config.data_directory;
            }
        }
        if (!families.empty()) {
            config.families = families;
            config.strategy = families.front();
        }
        if (seeds > 0) config.seeds = config.convex_seeds = seeds;
        if (jobs > 0) config.jobs = jobs;
        if (!out_dir.empty()) config.output_directory = out_dir;
        if (!grid.empty()) config.grid = grid;
        config.master_seed = master_seed_from_env();

        if (validate->parsed()) return cmd_validate(config, out);
        if (backtest->parsed()) return cmd_backtest(config, out);
        if (sweep->parsed()) return cmd_sweep(config, out, err);
        if (frontier->parsed()) return cmd_frontier(config, inputs, out);
        if (synth->parsed()) return cmd_synth(config, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}

}  // namespace frontier
