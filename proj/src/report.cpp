#include "frontier/report.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "frontier/error.hpp"

namespace frontier {

std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double to_double(const std::string& text, const std::string& where) {
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) throw DataError("malformed row at " + where);
    return v;
}

constexpr const char* kFrontierHeader = "family,variant,gamma_risk,gamma_trade,seed,excess_risk,excess_return,sharpe";

}  // namespace

void write_frontier_csv(const std::vector<FrontierPoint>& points, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    out << kFrontierHeader << '\n';
    for (const auto& p : points) {
        out << p.family << ',' << p.variant << ',' << format_double(p.prefs.gamma_risk) << ','
            << format_double(p.prefs.gamma_trade) << ',' << p.seed << ',' << format_double(p.excess_risk) << ','
            << format_double(p.excess_return) << ',' << (p.sharpe ? format_double(*p.sharpe) : "undefined") << '\n';
    }
}

std::vector<FrontierPoint> read_frontier_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("missing file: " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != kFrontierHeader) throw DataError("malformed row at " + path.string() + ":1");
    std::vector<FrontierPoint> out;
    for (std::size_t number = 2; std::getline(in, line); ++number) {
        if (line.empty()) continue;
        const std::string where = path.string() + ":" + std::to_string(number);
        const auto f = split(line);
        if (f.size() != 8) throw DataError("malformed row at " + where);
        FrontierPoint p;
        p.family = f[0];
        p.variant = f[1];
        p.prefs.gamma_risk = to_double(f[2], where);
        p.prefs.gamma_trade = to_double(f[3], where);
        std::size_t seed = 0;
        const auto res = std::from_chars(f[4].data(), f[4].data() + f[4].size(), seed);
        if (res.ec != std::errc{} || res.ptr != f[4].data() + f[4].size()) throw DataError("malformed row at " + where);
        p.seed = seed;
        p.excess_risk = to_double(f[5], where);
        p.excess_return = to_double(f[6], where);
        if (f[7] != "undefined") p.sharpe = to_double(f[7], where);
        out.push_back(std::move(p));
    }
    return out;
}

void write_mean_frontier_csv(const std::string& family, const MeanFrontier& frontier,
                             const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    out << "family,grid_risk,mean_return,ci_low,ci_high\n";
    for (std::size_t j = 0; j < frontier.grid.size(); ++j) {
        out << family << ',' << format_double(frontier.grid[j]) << ',' << format_double(frontier.mean[j]) << ','
            << format_double(frontier.ci_low[j]) << ',' << format_double(frontier.ci_high[j]) << '\n';
    }
}

std::string render_frontier_svg(const std::vector<ChartSeries>& series) {
    constexpr double width = 720, height = 480, left = 80, right = 170, top = 30, bottom = 60;
    constexpr const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"};

    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& s : series) {
        for (const auto& p : s.points) {
            x0 = std::min(x0, p.excess_risk);
            x1 = std::max(x1, p.excess_risk);
            y0 = std::min(y0, p.excess_return);
            y1 = std::max(y1, p.excess_return);
        }
    }
    if (!(x0 <= x1)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    if (x1 - x0 <= 0) x0 -= 0.5e-3, x1 += 0.5e-3;
    if (y1 - y0 <= 0) y0 -= 0.5e-3, y1 += 0.5e-3;
    const double px = 0.05 * (x1 - x0), py = 0.05 * (y1 - y0);
    x0 -= px, x1 += px, y0 -= py, y1 += py;

    const double plot_w = width - left - right, plot_h = height - top - bottom;
    auto sx = [&](double x) { return left + (x - x0) / (x1 - x0) * plot_w; };
    auto sy = [&](double y) { return top + (y1 - y) / (y1 - y0) * plot_h; };

    std::string svg;
    char buf[256];
    auto put = [&](const char* fmt, auto... args) {
        std::snprintf(buf, sizeof buf, fmt, args...);
        svg += buf;
    };
    put("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" viewBox=\"0 0 %.0f %.0f\">\n",
        width, height, width, height);
    put("<rect x=\"0\" y=\"0\" width=\"%.0f\" height=\"%.0f\" fill=\"white\"/>\n", width, height);
    put("<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" fill=\"none\" stroke=\"black\"/>\n", left, top,
        plot_w, plot_h);
    for (int k = 0; k <= 4; ++k) {
        const double xv = x0 + (x1 - x0) * k / 4.0, yv = y0 + (y1 - y0) * k / 4.0;
        put("<text x=\"%.2f\" y=\"%.2f\" font-size=\"11\" text-anchor=\"middle\">%.3g</text>\n", sx(xv),
            top + plot_h + 18, xv);
        put("<text x=\"%.2f\" y=\"%.2f\" font-size=\"11\" text-anchor=\"end\">%.3g</text>\n", left - 6, sy(yv) + 4, yv);
    }
    put("<text x=\"%.2f\" y=\"%.2f\" font-size=\"13\" text-anchor=\"middle\">excess risk (daily)</text>\n",
        left + plot_w / 2, height - 15);
    put("<text x=\"18\" y=\"%.2f\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 18 %.2f)\">"
        "excess return (daily)</text>\n",
        top + plot_h / 2, top + plot_h / 2);

    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* color = palette[k % (sizeof palette / sizeof *palette)];
        svg += "<g fill=\"";
        svg += color;
        svg += "\" fill-opacity=\"0.45\">\n";
        for (const auto& p : s.points) put("<circle cx=\"%.2f\" cy=\"%.2f\" r=\"2.5\"/>\n", sx(p.excess_risk), sy(p.excess_return));
        svg += "</g>\n";
        if (!s.pareto.empty()) {
            svg += "<polyline fill=\"none\" stroke-width=\"1.8\" stroke=\"";
            svg += color;
            svg += "\" points=\"";
            for (std::size_t j = 0; j < s.pareto.size(); ++j) {
                put(j == 0 ? "%.2f,%.2f" : " %.2f,%.2f", sx(s.pareto[j].excess_risk), sy(s.pareto[j].excess_return));
            }
            svg += "\"/>\n";
        }
        const double ly = top + 14 + 18.0 * static_cast<double>(k);
        put("<rect x=\"%.2f\" y=\"%.2f\" width=\"12\" height=\"12\" fill=\"%s\"/>\n", width - right + 15, ly - 10, color);
        put("<text x=\"%.2f\" y=\"%.2f\" font-size=\"12\">", width - right + 33, ly);
        for (char c : s.label) {
            if (c == '<') svg += "&lt;";
            else if (c == '>') svg += "&gt;";
            else if (c == '&') svg += "&amp;";
            else svg += c;
        }
        svg += "</text>\n";
    }
    svg += "</svg>\n";
    return svg;
}

}  // namespace frontier
