#include "frontier/policy.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "frontier/error.hpp"

namespace frontier {

namespace {

struct Layout {
    std::size_t conv_w = 0, conv_b = 0, hidden_w = 0, hidden_b = 0, out_w = 0, out_b = 0, total = 0;

    explicit Layout(const PolicyArchitecture& a) {
        std::size_t at = 0;
        if (a.uses_window()) {
            conv_w = at;
            at += a.maps() * a.slots() * a.kernel;
            conv_b = at;
            at += a.maps();
        }
        hidden_w = at;
        at += a.hidden_size() * a.input_size();
        hidden_b = at;
        at += a.hidden_size();
        out_w = at;
        at += a.slots() * a.hidden_size();
        out_b = at;
        at += a.slots();
        total = at;
    }
};

using ConstMap = Eigen::Map<const Eigen::MatrixXd>;
using Map = Eigen::Map<Eigen::MatrixXd>;

Eigen::Index idx(std::size_t v) { return static_cast<Eigen::Index>(v); }

}  // namespace

std::string_view to_string(PolicyVariant variant) {
    switch (variant) {
        case PolicyVariant::LogReturns: return "log-returns";
        case PolicyVariant::ForecastOnly: return "forecast-only";
        case PolicyVariant::AllInputs: return "all-inputs";
    }
    return "unknown";
}

PolicyVariant parse_policy_variant(std::string_view text) {
    if (text == "log-returns") return PolicyVariant::LogReturns;
    if (text == "forecast-only") return PolicyVariant::ForecastOnly;
    if (text == "all-inputs") return PolicyVariant::AllInputs;
    throw ConfigError("unknown policy variant '" + std::string(text) + "'");
}

std::size_t PolicyArchitecture::input_size() const {
    std::size_t size = conv_outputs() + slots() + 2 * num_risky;
    if (uses_forecasts()) size += horizon * slots();
    return size;
}

std::size_t PolicyArchitecture::parameter_count() const { return Layout(*this).total; }

void PolicyArchitecture::validate() const {
    if (num_risky < 1) throw ConfigError("policy needs at least one risky asset");
    if (uses_window() && (kernel < 1 || lookback < kernel)) {
        throw ConfigError("policy lookback must be at least the kernel width");
    }
    if (uses_forecasts() && horizon < 1) throw ConfigError("policy forecast horizon must be >= 1");
}

PolicyNetwork::PolicyNetwork(const PolicyArchitecture& arch) : arch_(arch) {
    arch_.validate();
    params_ = Eigen::VectorXd::Zero(idx(arch_.parameter_count()));
}

PolicyNetwork PolicyNetwork::initialized(const PolicyArchitecture& arch, std::uint64_t seed, double scale) {
    PolicyNetwork net(arch);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-scale, scale);
    for (Eigen::Index i = 0; i < net.params_.size(); ++i) net.params_(i) = dist(rng);
    return net;
}

void PolicyNetwork::check_state(const StateInput& s) const {
    const auto slots = idx(arch_.slots());
    const auto n = idx(arch_.num_risky);
    if (arch_.uses_window() &&
        (s.log_return_window.rows() != slots || s.log_return_window.cols() != idx(arch_.lookback))) {
        throw DimensionError("log-return window must be (n+1) x L");
    }
    if (arch_.uses_forecasts()) {
        if (s.forecasts.size() != arch_.horizon) throw DimensionError("wrong number of forecast vectors");
        for (const auto& f : s.forecasts) {
            if (f.size() != slots) throw DimensionError("forecast vector must have n+1 entries");
        }
    }
    if (s.weights.size() != slots) throw DimensionError("weights must have n+1 entries");
    if (s.volume_features.size() != n || s.volatility_features.size() != n) {
        throw DimensionError("volume and volatility features must have n entries");
    }
}

Eigen::VectorXd PolicyNetwork::forward(const StateInput& state) const {
    Tape tape;
    return forward(state, tape);
}

Eigen::VectorXd PolicyNetwork::forward(const StateInput& s, Tape& tape) const {
    check_state(s);
    const Layout L(arch_);
    const auto slots = idx(arch_.slots());
    const auto maps = idx(arch_.maps());
    const auto width = idx(arch_.conv_width());
    const auto kernel = idx(arch_.kernel);
    const double* p = params_.data();

    tape.input.resize(idx(arch_.input_size()));
    Eigen::Index at = 0;
    if (arch_.uses_window()) {
        tape.window = s.log_return_window;
        tape.conv_pre.resize(maps, width);
        for (Eigen::Index m = 0; m < maps; ++m) {
            // kernel for map m, stored asset-major: (slots x kernel) row-major
            const double* k = p + L.conv_w + static_cast<std::size_t>(m * slots * kernel);
            for (Eigen::Index pos = 0; pos < width; ++pos) {
                double acc = p[L.conv_b + static_cast<std::size_t>(m)];
                for (Eigen::Index a = 0; a < slots; ++a) {
                    for (Eigen::Index q = 0; q < kernel; ++q) acc += k[a * kernel + q] * s.log_return_window(a, pos + q);
                }
                tape.conv_pre(m, pos) = acc;
                tape.input(at++) = std::max(0.0, acc);
            }
        }
    }
    if (arch_.uses_forecasts()) {
        for (const auto& f : s.forecasts) {
            tape.input.segment(at, slots) = f;
            at += slots;
        }
    }
    tape.input.segment(at, slots) = s.weights;
    at += slots;
    tape.input.segment(at, s.volume_features.size()) = s.volume_features;
    at += s.volume_features.size();
    tape.input.segment(at, s.volatility_features.size()) = s.volatility_features;

    const auto hid = idx(arch_.hidden_size());
    const auto in = idx(arch_.input_size());
    const ConstMap w1(p + L.hidden_w, hid, in);
    const Eigen::Map<const Eigen::VectorXd> b1(p + L.hidden_b, hid);
    tape.hidden_pre = w1 * tape.input + b1;
    tape.hidden = tape.hidden_pre.cwiseMax(0.0);

    const ConstMap w2(p + L.out_w, slots, hid);
    const Eigen::Map<const Eigen::VectorXd> b2(p + L.out_b, slots);
    Eigen::VectorXd logits = w2 * tape.hidden + b2;
    logits.array() -= logits.maxCoeff();
    tape.output = logits.array().exp();
    tape.output /= tape.output.sum();
    return tape.output;
}

Eigen::VectorXd PolicyNetwork::backward(const Tape& tape, const Eigen::VectorXd& dy,
                                        Eigen::VectorXd& grad) const {
    if (grad.size() != params_.size()) grad = Eigen::VectorXd::Zero(params_.size());
    const Layout L(arch_);
    const auto slots = idx(arch_.slots());
    const auto hid = idx(arch_.hidden_size());
    const auto in = idx(arch_.input_size());
    const double* p = params_.data();
    double* g = grad.data();

    const Eigen::VectorXd& y = tape.output;
    const Eigen::VectorXd dlogits = y.cwiseProduct(dy.array().matrix() - Eigen::VectorXd::Constant(slots, y.dot(dy)));

    Map(g + L.out_w, slots, hid) += dlogits * tape.hidden.transpose();
    Eigen::Map<Eigen::VectorXd>(g + L.out_b, slots) += dlogits;
    const Eigen::VectorXd dhidden = ConstMap(p + L.out_w, slots, hid).transpose() * dlogits;
    const Eigen::VectorXd dpre = (tape.hidden_pre.array() > 0.0).select(dhidden, 0.0);

    Map(g + L.hidden_w, hid, in) += dpre * tape.input.transpose();
    Eigen::Map<Eigen::VectorXd>(g + L.hidden_b, hid) += dpre;
    const Eigen::VectorXd dinput = ConstMap(p + L.hidden_w, hid, in).transpose() * dpre;

    Eigen::Index at = 0;
    if (arch_.uses_window()) {
        const auto maps = idx(arch_.maps());
        const auto width = idx(arch_.conv_width());
        const auto kernel = idx(arch_.kernel);
        for (Eigen::Index m = 0; m < maps; ++m) {
            double* dk = g + L.conv_w + static_cast<std::size_t>(m * slots * kernel);
            for (Eigen::Index pos = 0; pos < width; ++pos) {
                const Eigen::Index unit = at++;
                if (tape.conv_pre(m, pos) <= 0.0) continue;
                const double d = dinput(unit);
                g[L.conv_b + static_cast<std::size_t>(m)] += d;
                for (Eigen::Index a = 0; a < slots; ++a) {
                    for (Eigen::Index q = 0; q < kernel; ++q) dk[a * kernel + q] += d * tape.window(a, pos + q);
                }
            }
        }
    }
    if (arch_.uses_forecasts()) at += idx(arch_.horizon) * slots;
    return dinput.segment(at, slots);
}

void PolicyNetwork::save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    out << "frontier-policy 1 variant=" << to_string(arch_.variant) << " n=" << arch_.num_risky
        << " L=" << arch_.lookback << " tau=" << arch_.kernel << " H=" << arch_.horizon
        << " k_maps=" << arch_.maps() << " params=" << params_.size() << '\n';
    char buf[32];
    for (Eigen::Index i = 0; i < params_.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g\n", params_(i));
        out << buf;
    }
}

PolicyNetwork PolicyNetwork::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("missing file: " + path.string());
    std::string header;
    std::getline(in, header);
    std::istringstream fields(header);
    std::string magic, version;
    fields >> magic >> version;
    if (magic != "frontier-policy" || version != "1") throw DataError("not a policy file: " + path.string());

    std::map<std::string, std::string> kv;
    for (std::string token; fields >> token;) {
        const auto eq = token.find('=');
        if (eq == std::string::npos) throw DataError("malformed policy header in " + path.string());
        kv[token.substr(0, eq)] = token.substr(eq + 1);
    }
    auto number = [&](const std::string& key) -> std::size_t {
        const auto it = kv.find(key);
        if (it == kv.end()) throw DataError("policy header lacks '" + key + "'");
        return static_cast<std::size_t>(std::stoull(it->second));
    };
    if (!kv.count("variant")) throw DataError("policy header lacks 'variant'");

    PolicyArchitecture arch;
    arch.variant = parse_policy_variant(kv["variant"]);
    arch.num_risky = number("n");
    arch.lookback = number("L");
    arch.kernel = number("tau");
    arch.horizon = number("H");
    arch.feature_maps = number("k_maps");
    if (arch.feature_maps == arch.slots()) arch.feature_maps = 0;
    PolicyNetwork net(arch);
    if (number("params") != static_cast<std::size_t>(net.params_.size())) {
        throw DataError("policy parameter count does not match its architecture");
    }
    for (Eigen::Index i = 0; i < net.params_.size(); ++i) {
        std::string line;
        if (!std::getline(in, line)) throw DataError("truncated policy file: " + path.string());
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), v);
        if (ec != std::errc{}) throw DataError("malformed parameter in " + path.string());
        net.params_(i) = v;
    }
    return net;
}

}  // namespace frontier
