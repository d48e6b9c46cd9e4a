#include "frontier/market_data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string_view>

#include "frontier/error.hpp"

namespace frontier {

namespace fs = std::filesystem;

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

double parse_number(std::string_view text, const std::string& where) {
    double value = 0.0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (text.empty() || ec != std::errc{} || ptr != end || !std::isfinite(value)) {
        throw DataError("malformed row at " + where + ": bad number '" + std::string(text) + "'");
    }
    return value;
}

struct CsvTable {
    std::vector<Date> dates;
    std::vector<std::vector<double>> columns;
};

CsvTable read_table(const fs::path& path, std::string_view expected_header,
                    const DateRange& calendar) {
    std::ifstream in(path);
    if (!in) throw DataError("missing file: " + path.string());

    std::string line;
    if (!std::getline(in, line) || trim(line) != expected_header) {
        throw DataError("malformed header in " + path.string() + ": expected '" +
                        std::string(expected_header) + "'");
    }
    const std::size_t width = split_fields(expected_header).size();

    CsvTable table;
    table.columns.resize(width - 1);
    std::size_t line_no = 1;
    Date previous;
    bool have_previous = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const std::string where = path.string() + ":" + std::to_string(line_no);
        const auto fields = split_fields(line);
        if (fields.size() != width) {
            throw DataError("malformed row at " + where + ": expected " + std::to_string(width) +
                            " fields");
        }
        Date date;
        try {
            date = Date::parse(fields[0]);
        } catch (const DataError& e) {
            throw DataError("malformed row at " + where + ": " + e.what());
        }
        if (have_previous && !(previous < date)) {
            throw DataError("malformed row at " + where + ": dates must be strictly increasing");
        }
        previous = date;
        have_previous = true;
        std::vector<double> values(width - 1);
        for (std::size_t c = 1; c < width; ++c) values[c - 1] = parse_number(fields[c], where);
        if (!calendar.contains(date)) continue;
        table.dates.push_back(date);
        for (std::size_t c = 0; c + 1 < width; ++c) table.columns[c].push_back(values[c]);
    }
    return table;
}

Eigen::VectorXd to_vector(const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

void write_number(std::ostream& out, double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf;
}

}  // namespace

std::size_t PricePanel::index_of(const Date& d) const {
    return static_cast<std::size_t>(std::lower_bound(dates.begin(), dates.end(), d) - dates.begin());
}

void PricePanel::validate() const {
    const auto t = static_cast<Eigen::Index>(dates.size());
    const auto n = static_cast<Eigen::Index>(assets.size());
    for (const auto* m : {&open, &high, &low, &close, &volume}) {
        if (m->rows() != t || m->cols() != n) throw DataError("price panel shape mismatch");
    }
    if (risk_free.size() != t) throw DataError("risk-free series length mismatch");
    for (std::size_t i = 1; i < dates.size(); ++i) {
        if (!(dates[i - 1] < dates[i])) throw DataError("panel dates must be strictly increasing");
    }
    for (const auto* m : {&open, &high, &low, &close}) {
        if (!(m->array() > 0.0).all()) throw DataError("non-positive price in panel");
    }
    if (!(volume.array() >= 0.0).all()) throw DataError("negative volume in panel");
}

PricePanel load_panel(const PanelSource& source, const DateRange& calendar) {
    const fs::path rf_path = source.directory / source.risk_free_file;
    const CsvTable rf = read_table(rf_path, "date,rate", calendar);
    if (rf.dates.empty()) throw DataError("no risk-free dates inside the calendar: " + rf_path.string());

    std::vector<std::string> assets = source.assets;
    if (assets.empty()) {
        if (!fs::is_directory(source.directory)) {
            throw DataError("missing file: " + source.directory.string());
        }
        for (const auto& entry : fs::directory_iterator(source.directory)) {
            if (entry.path().extension() == ".csv" && entry.path().filename() != source.risk_free_file) {
                assets.push_back(entry.path().stem().string());
            }
        }
        std::sort(assets.begin(), assets.end());
    }
    if (assets.empty()) throw DataError("no asset files in " + source.directory.string());

    const auto t = static_cast<Eigen::Index>(rf.dates.size());
    const auto n = static_cast<Eigen::Index>(assets.size());
    PricePanel panel;
    panel.assets = assets;
    panel.dates = rf.dates;
    panel.risk_free = to_vector(rf.columns[0]);
    panel.open.resize(t, n);
    panel.high.resize(t, n);
    panel.low.resize(t, n);
    panel.close.resize(t, n);
    panel.volume.resize(t, n);

    for (Eigen::Index j = 0; j < n; ++j) {
        const auto& id = assets[static_cast<std::size_t>(j)];
        const fs::path path = source.directory / (id + ".csv");
        const CsvTable table = read_table(path, "date,open,high,low,close,volume", calendar);
        if (table.dates != rf.dates) {
            // name the first date that breaks alignment
            std::size_t k = 0;
            while (k < table.dates.size() && k < rf.dates.size() && table.dates[k] == rf.dates[k]) ++k;
            std::string detail;
            if (k < rf.dates.size() && (k >= table.dates.size() || rf.dates[k] < table.dates[k])) {
                detail = "missing " + rf.dates[k].to_string();
            } else {
                detail = "unexpected " + table.dates[k].to_string();
            }
            throw DataError("calendar misalignment: asset '" + id + "' " + detail);
        }
        for (Eigen::Index i = 0; i < t; ++i) {
            const auto r = static_cast<std::size_t>(i);
            for (std::size_t c = 0; c < 4; ++c) {
                if (!(table.columns[c][r] > 0.0)) {
                    throw DataError("non-positive price: asset '" + id + "' on " +
                                    table.dates[r].to_string());
                }
            }
            if (table.columns[4][r] < 0.0) {
                throw DataError("negative volume: asset '" + id + "' on " + table.dates[r].to_string());
            }
            panel.open(i, j) = table.columns[0][r];
            panel.high(i, j) = table.columns[1][r];
            panel.low(i, j) = table.columns[2][r];
            panel.close(i, j) = table.columns[3][r];
            panel.volume(i, j) = table.columns[4][r];
        }
    }
    panel.validate();
    return panel;
}

void write_panel(const PricePanel& panel, const fs::path& directory) {
    panel.validate();
    fs::create_directories(directory);
    {
        std::ofstream out(directory / "risk_free.csv");
        out << "date,rate\n";
        for (std::size_t i = 0; i < panel.num_dates(); ++i) {
            out << panel.dates[i].to_string() << ',';
            write_number(out, panel.risk_free(static_cast<Eigen::Index>(i)));
            out << '\n';
        }
    }
    for (std::size_t j = 0; j < panel.num_risky(); ++j) {
        std::ofstream out(directory / (panel.assets[j] + ".csv"));
        out << "date,open,high,low,close,volume\n";
        const auto c = static_cast<Eigen::Index>(j);
        for (std::size_t i = 0; i < panel.num_dates(); ++i) {
            const auto r = static_cast<Eigen::Index>(i);
            out << panel.dates[i].to_string();
            for (const auto* m : {&panel.open, &panel.high, &panel.low, &panel.close, &panel.volume}) {
                out << ',';
                write_number(out, (*m)(r, c));
            }
            out << '\n';
        }
    }
}

Eigen::VectorXd ReturnsPanel::simple_at(std::size_t t) const {
    if (t == 0 || t > dates.size()) throw HistoryError("no return for panel date " + std::to_string(t));
    return simple.row(static_cast<Eigen::Index>(t - 1)).transpose();
}

Eigen::VectorXd ReturnsPanel::log_at(std::size_t t) const {
    if (t == 0 || t > dates.size()) throw HistoryError("no return for panel date " + std::to_string(t));
    return log.row(static_cast<Eigen::Index>(t - 1)).transpose();
}

ReturnsPanel compute_returns(const PricePanel& panel) {
    if (panel.num_dates() < 2) throw DataError("compute_returns needs at least two dates");
    const auto periods = static_cast<Eigen::Index>(panel.num_dates() - 1);
    const auto n = static_cast<Eigen::Index>(panel.num_risky());

    ReturnsPanel out;
    out.dates.assign(panel.dates.begin() + 1, panel.dates.end());
    out.simple.resize(periods, n + 1);
    const auto& p = panel.close;
    out.simple.leftCols(n) =
        (p.bottomRows(periods).array() - p.topRows(periods).array()) / p.topRows(periods).array();
    out.simple.col(n) = panel.risk_free.tail(periods);
    out.log = out.simple.array().log1p().matrix();
    return out;
}

Eigen::VectorXd trailing_mean(const Eigen::MatrixXd& series, std::size_t t, std::size_t window) {
    if (window == 0) throw ConfigError("rolling window must be positive");
    if (t < window) {
        throw HistoryError("insufficient history: need " + std::to_string(window) +
                           " prior days at index " + std::to_string(t));
    }
    if (t > static_cast<std::size_t>(series.rows())) throw HistoryError("index past end of series");
    const auto w = static_cast<Eigen::Index>(window);
    return series.middleRows(static_cast<Eigen::Index>(t) - w, w).colwise().mean().transpose();
}

Eigen::VectorXd rolling_volume_estimate(const PricePanel& panel, std::size_t t) {
    return trailing_mean(panel.volume, t);
}

Eigen::VectorXd rolling_volatility_estimate(const Eigen::MatrixXd& sigmas, std::size_t t) {
    return trailing_mean(sigmas, t);
}

double intraday_volatility_proxy(double open, double close) {
    if (!(open > 0.0) || !(close > 0.0)) throw DataError("non-positive price");
    return std::abs(std::log(open) - std::log(close));
}

Eigen::MatrixXd volatility_proxy(const PricePanel& panel) {
    Eigen::MatrixXd out(panel.open.rows(), panel.open.cols());
    for (Eigen::Index j = 0; j < out.cols(); ++j) {
        for (Eigen::Index i = 0; i < out.rows(); ++i) {
            out(i, j) = intraday_volatility_proxy(panel.open(i, j), panel.close(i, j));
        }
    }
    return out;
}

void ForecastConfig::validate() const {
    if (!(noise_variance >= 0.0)) throw ConfigError("forecast noise variance must be >= 0");
    if (!(returns_variance > 0.0)) throw ConfigError("forecast returns variance must be > 0");
    if (horizon < 1) throw ConfigError("forecast horizon must be >= 1");
}

Eigen::VectorXd simulate_forecast(const Eigen::VectorXd& realized, const ForecastConfig& cfg,
                                  std::mt19937_64& rng) {
    cfg.validate();
    const double alpha = cfg.alpha();
    if (cfg.noise_variance == 0.0) return alpha * realized;
    std::normal_distribution<double> noise(0.0, std::sqrt(cfg.noise_variance));
    Eigen::VectorXd out(realized.size());
    for (Eigen::Index i = 0; i < realized.size(); ++i) out(i) = alpha * (realized(i) + noise(rng));
    return out;
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    // splitmix64 finalizer applied to a running combination
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    return mix(mix(mix(a) ^ b) ^ c);
}

ForecastNoise::ForecastNoise(std::uint64_t seed, double variance)
    : seed_(seed), stddev_(std::sqrt(variance)) {
    if (!(variance >= 0.0)) throw ConfigError("noise variance must be >= 0");
}

double ForecastNoise::draw(std::size_t asset, std::size_t date) const {
    if (stddev_ == 0.0) return 0.0;
    std::mt19937_64 engine(mix_seed(seed_, asset, date));
    std::normal_distribution<double> noise(0.0, stddev_);
    return noise(engine);
}

Eigen::VectorXd feature_baseline(const Eigen::MatrixXd& values, std::size_t train_start,
                                 std::size_t window) {
    if (train_start < window || train_start > static_cast<std::size_t>(values.rows())) {
        throw HistoryError("insufficient pre-training history for normalization baseline");
    }
    const auto w = static_cast<Eigen::Index>(window);
    const auto block = values.middleRows(static_cast<Eigen::Index>(train_start) - w, w);
    if (!block.allFinite()) throw HistoryError("insufficient pre-training history for normalization baseline");
    Eigen::VectorXd mean = block.colwise().mean().transpose();
    for (Eigen::Index j = 0; j < mean.size(); ++j) {
        if (mean(j) == 0.0) throw NumericalError("degenerate baseline: zero mean in column " + std::to_string(j));
    }
    return mean;
}

Eigen::MatrixXd normalize_features(const Eigen::MatrixXd& values, std::size_t train_start,
                                   std::size_t window) {
    const Eigen::VectorXd base = feature_baseline(values, train_start, window);
    return values.array().rowwise() / base.transpose().array();
}

}  // namespace frontier
