#include "frontier/config.hpp"

#include <CLI11.hpp>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "frontier/error.hpp"
#include "frontier/report.hpp"

namespace frontier {

namespace {

using Values = std::vector<std::string>;

std::vector<std::string> flatten(const Values& values) {
    std::vector<std::string> out;
    for (const auto& v : values) {
        std::string item;
        std::istringstream in(v);
        while (std::getline(in, item, ',')) {
            const auto b = item.find_first_not_of(" \t");
            if (b == std::string::npos) continue;
            out.push_back(item.substr(b, item.find_last_not_of(" \t") - b + 1));
        }
    }
    return out;
}

std::string single(const std::string& key, const Values& values) {
    const auto items = flatten(values);
    if (items.size() != 1) throw ConfigError("config key '" + key + "' expects one value");
    return items.front();
}

template <class T>
T number(const std::string& key, const Values& values) {
    const std::string text = single(key, values);
    T v{};
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
        throw ConfigError("config key '" + key + "' has invalid value '" + text + "'");
    }
    return v;
}

std::vector<double> numbers(const std::string& key, const Values& values) {
    std::vector<double> out;
    for (const auto& item : flatten(values)) out.push_back(number<double>(key, {item}));
    return out;
}

Date date_value(const std::string& key, const Values& values) {
    try {
        return Date::parse(single(key, values));
    } catch (const DataError&) {
        throw ConfigError("config key '" + key + "' is not a YYYY-MM-DD date");
    }
}

std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) out += (i ? "," : "") + items[i];
    return out;
}

std::string join(const std::vector<double>& items) {
    std::vector<std::string> text;
    for (double v : items) text.push_back(format_double(v));
    return join(text);
}

std::string quoted(const std::string& s) { return "\"" + s + "\""; }

struct Field {
    std::string section;
    std::string key;
    std::function<void(RunConfig&, const std::string&, const Values&)> set;
    std::function<std::string(const RunConfig&)> get;
};

#define FRONTIER_NUMBER(SECTION, KEY, TYPE, MEMBER)                                                    \
    Field {                                                                                           \
        SECTION, KEY, [](RunConfig& c, const std::string& k, const Values& v) { c.MEMBER = number<TYPE>(k, v); }, \
            [](const RunConfig& c) { return format_value(c.MEMBER); }                                 \
    }

std::string format_value(double v) { return format_double(v); }
template <class T>
std::string format_value(T v) {
    return std::to_string(v);
}

const std::vector<Field>& fields() {
    static const std::vector<Field> table = {
        {"data", "directory", [](RunConfig& c, const std::string& k, const Values& v) { c.data_directory = single(k, v); },
         [](const RunConfig& c) { return quoted(c.data_directory.string()); }},
        {"data", "assets", [](RunConfig& c, const std::string&, const Values& v) { c.assets = flatten(v); },
         [](const RunConfig& c) { return quoted(join(c.assets)); }},
        {"data", "risk_free_file", [](RunConfig& c, const std::string& k, const Values& v) { c.risk_free_file = single(k, v); },
         [](const RunConfig& c) { return quoted(c.risk_free_file); }},
        {"data", "calendar_start", [](RunConfig& c, const std::string& k, const Values& v) { c.calendar.first = date_value(k, v); },
         [](const RunConfig& c) { return c.calendar.first.to_string(); }},
        {"data", "calendar_end", [](RunConfig& c, const std::string& k, const Values& v) { c.calendar.last = date_value(k, v); },
         [](const RunConfig& c) { return c.calendar.last.to_string(); }},
        {"split", "train_start", [](RunConfig& c, const std::string& k, const Values& v) { c.train.first = date_value(k, v); },
         [](const RunConfig& c) { return c.train.first.to_string(); }},
        {"split", "train_end", [](RunConfig& c, const std::string& k, const Values& v) { c.train.last = date_value(k, v); },
         [](const RunConfig& c) { return c.train.last.to_string(); }},
        {"split", "test_start", [](RunConfig& c, const std::string& k, const Values& v) { c.test.first = date_value(k, v); },
         [](const RunConfig& c) { return c.test.first.to_string(); }},
        {"split", "test_end", [](RunConfig& c, const std::string& k, const Values& v) { c.test.last = date_value(k, v); },
         [](const RunConfig& c) { return c.test.last.to_string(); }},
        FRONTIER_NUMBER("costs", "a", double, costs.a),
        FRONTIER_NUMBER("costs", "b", double, costs.b),
        FRONTIER_NUMBER("costs", "c", double, costs.c),
        FRONTIER_NUMBER("forecast", "noise_variance", double, forecast.noise_variance),
        FRONTIER_NUMBER("forecast", "returns_variance", double, forecast.returns_variance),
        FRONTIER_NUMBER("forecast", "horizon", int, forecast.horizon),
        FRONTIER_NUMBER("risk", "covariance_window", std::size_t, market.covariance_window),
        FRONTIER_NUMBER("risk", "factors", std::size_t, market.factors),
        FRONTIER_NUMBER("solver", "tol", double, solver.tol),
        FRONTIER_NUMBER("solver", "max_iter", int, solver.max_iter),
        FRONTIER_NUMBER("solver", "mpo_horizon", std::size_t, mpo_horizon),
        FRONTIER_NUMBER("training", "episodes", std::size_t, training.episodes),
        FRONTIER_NUMBER("training", "episode_length", std::size_t, training.episode_length),
        FRONTIER_NUMBER("training", "discount", double, training.discount),
        {"training", "optimizer",
         [](RunConfig& c, const std::string& k, const Values& v) { c.training.optimizer = parse_optimizer_kind(single(k, v)); },
         [](const RunConfig& c) { return std::string(to_string(c.training.optimizer)); }},
        FRONTIER_NUMBER("training", "learning_rate", double, training.learning_rate),
        FRONTIER_NUMBER("training", "clip_norm", double, training.clip_norm),
        FRONTIER_NUMBER("training", "init_scale", double, training.init_scale),
        FRONTIER_NUMBER("training", "adam_beta1", double, training.adam_beta1),
        FRONTIER_NUMBER("training", "adam_beta2", double, training.adam_beta2),
        FRONTIER_NUMBER("training", "adam_epsilon", double, training.adam_epsilon),
        FRONTIER_NUMBER("training", "smoothing_delta", double, training.smoothing_delta),
        FRONTIER_NUMBER("training", "portfolio_value", double, training.portfolio_value),
        FRONTIER_NUMBER("training", "lookback", std::size_t, lookback),
        FRONTIER_NUMBER("training", "kernel", std::size_t, kernel),
        {"sweep", "grid", [](RunConfig& c, const std::string& k, const Values& v) { c.grid = single(k, v); },
         [](const RunConfig& c) { return c.grid; }},
        {"sweep", "risk_values", [](RunConfig& c, const std::string& k, const Values& v) { c.risk_values = numbers(k, v); },
         [](const RunConfig& c) { return quoted(join(c.risk_values)); }},
        {"sweep", "trade_values", [](RunConfig& c, const std::string& k, const Values& v) { c.trade_values = numbers(k, v); },
         [](const RunConfig& c) { return quoted(join(c.trade_values)); }},
        {"sweep", "families", [](RunConfig& c, const std::string&, const Values& v) { c.families = flatten(v); },
         [](const RunConfig& c) { return quoted(join(c.families)); }},
        FRONTIER_NUMBER("sweep", "seeds", std::size_t, seeds),
        FRONTIER_NUMBER("sweep", "convex_seeds", std::size_t, convex_seeds),
        FRONTIER_NUMBER("sweep", "jobs", std::size_t, jobs),
        FRONTIER_NUMBER("sweep", "mean_resolution", std::size_t, mean_resolution),
        {"backtest", "strategy", [](RunConfig& c, const std::string& k, const Values& v) { c.strategy = single(k, v); },
         [](const RunConfig& c) { return c.strategy; }},
        FRONTIER_NUMBER("backtest", "gamma_risk", double, prefs.gamma_risk),
        FRONTIER_NUMBER("backtest", "gamma_trade", double, prefs.gamma_trade),
        FRONTIER_NUMBER("backtest", "seed", std::size_t, seed_index),
        FRONTIER_NUMBER("synthetic", "assets", std::size_t, synthetic_assets),
        FRONTIER_NUMBER("synthetic", "days", std::size_t, synthetic_days),
        FRONTIER_NUMBER("synthetic", "seed", std::uint64_t, synthetic_seed),
        {"output", "directory", [](RunConfig& c, const std::string& k, const Values& v) { c.output_directory = single(k, v); },
         [](const RunConfig& c) { return quoted(c.output_directory.string()); }},
    };
    return table;
}

#undef FRONTIER_NUMBER

}  // namespace

SweepGrid RunConfig::sweep_grid() const {
    SweepGrid g;
    if (grid == "full") {
        g = SweepGrid::full();
    } else if (grid == "small") {
        g = SweepGrid::small();
    } else if (grid != "custom") {
        throw ConfigError("grid must be 'full', 'small', or 'custom', not '" + grid + "'");
    }
    if (!risk_values.empty()) g.risk_values = risk_values;
    if (!trade_values.empty()) g.trade_values = trade_values;
    g.validate();
    return g;
}

SweepSettings RunConfig::sweep_settings(const StrategyFamily& family) const {
    SweepSettings s;
    s.train = train;
    s.test = test;
    s.costs = costs;
    s.forecast = forecast;
    s.solver = solver;
    s.mpo_horizon = mpo_horizon;
    s.training = training;
    s.lookback = lookback;
    s.kernel = kernel;
    s.master_seed = master_seed;
    s.seeds = family.kind == StrategyFamily::Kind::Frontier ? seeds : convex_seeds;
    s.jobs = jobs;
    return s;
}

PanelSource RunConfig::panel_source() const { return PanelSource{data_directory, assets, risk_free_file}; }

void RunConfig::validate() const {
    if (train.empty()) throw ConfigError("training range is empty");
    if (test.empty()) throw ConfigError("test range is empty");
    if (test.first < train.last) throw ConfigError("test range must start at or after the end of the training range");
    if (calendar.empty()) throw ConfigError("calendar range is empty");
    costs.validate();
    forecast.validate();
    training.validate();
    if (mpo_horizon < 1) throw ConfigError("mpo_horizon must be >= 1");
    if (jobs < 1) throw ConfigError("jobs must be >= 1");
    if (seeds < 1 || convex_seeds < 1) throw ConfigError("seed counts must be >= 1");
    if (families.empty()) throw ConfigError("no strategy families selected");
    for (const auto& f : families) StrategyFamily::parse(f);
    StrategyFamily::parse(strategy);
    prefs.validate();
    (void)sweep_grid();
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("missing file: " + path.string());
    std::vector<CLI::ConfigItem> items;
    try {
        items = CLI::ConfigINI().from_config(in);
    } catch (const CLI::Error& e) {
        throw ConfigError("cannot parse " + path.string() + ": " + e.what());
    }
    std::map<std::string, const Field*> lookup;
    for (const auto& f : fields()) lookup[f.section + "." + f.key] = &f;

    RunConfig config;
    for (const auto& item : items) {
        if (item.name == "++" || item.name == "--") continue;
        const std::string key = item.fullname();
        const auto it = lookup.find(key);
        if (it == lookup.end()) throw ConfigError("unknown config key '" + key + "' in " + path.string());
        it->second->set(config, key, item.inputs);
    }
    return config;
}

std::string to_config_text(const RunConfig& config) {
    std::string out;
    std::string section;
    for (const auto& f : fields()) {
        if (f.section != section) {
            out += (section.empty() ? "[" : "\n[") + f.section + "]\n";
            section = f.section;
        }
        out += f.key + " = " + f.get(config) + "\n";
    }
    return out;
}

}  // namespace frontier
