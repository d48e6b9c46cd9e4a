#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "frontier/config.hpp"

namespace frontier {

/**
 * Command-line entry point: `validate`, `backtest`, `sweep`, `frontier`, and
 * `synth`. Returns the process exit status; diagnostics go to `err`.
 */
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int cmd_validate(const RunConfig& config, std::ostream& out);
int cmd_backtest(const RunConfig& config, std::ostream& out);
int cmd_sweep(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_frontier(const RunConfig& config, const std::vector<std::string>& inputs, std::ostream& out);
int cmd_synth(const RunConfig& config, std::ostream& out);

}  // namespace frontier
