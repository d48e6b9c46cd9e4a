#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "frontier/sweep.hpp"

namespace frontier {

/// `family,variant,gamma_risk,gamma_trade,seed,excess_risk,excess_return,sharpe`
void write_frontier_csv(const std::vector<FrontierPoint>& points, const std::filesystem::path& path);
std::vector<FrontierPoint> read_frontier_csv(const std::filesystem::path& path);

/// `family,grid_risk,mean_return,ci_low,ci_high`
void write_mean_frontier_csv(const std::string& family, const MeanFrontier& frontier,
                             const std::filesystem::path& path);

/// One family on a risk-return chart: all points plus its Pareto line.
struct ChartSeries {
    std::string label;
    std::vector<FrontierPoint> points;
    std::vector<FrontierPoint> pareto;
};

/// Scatter of excess risk against excess return. Output is a pure function of the input.
std::string render_frontier_svg(const std::vector<ChartSeries>& series);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double value);

}  // namespace frontier
