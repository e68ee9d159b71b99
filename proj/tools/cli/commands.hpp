#pragma once

#include <string>
#include <vector>

#include "config.hpp"

namespace fracpq::cli {

enum ExitCode : int { exit_ok = 0, exit_config = 1, exit_nonconvergence = 2 };

int cmd_eig(const RunConfig& config);
int cmd_solve(const RunConfig& config);
int cmd_sweep(const RunConfig& config);
int cmd_rn(const RunConfig& config);
int cmd_verify(const RunConfig& config);

/// Parses `fracpq <command> [-c file] [-o dir] [--section.key=value ...]`,
/// runs the command and maps errors to exit codes; messages go to stderr.
int run_cli(const std::vector<std::string>& args);

}  // namespace fracpq::cli
