#pragma once

#include <string>
#include <vector>

namespace icf {

/// Exit codes of the command-line tool.
enum ExitCode : int { exit_ok = 0, exit_failure = 1, exit_config = 2, exit_numerical = 3 };

/// Parses `start:stop:count` (inclusive) or a single number.
std::vector<double> parse_grid(const std::string& spec);

/// Entry point of the `icf` tool.
int run_cli(int argc, const char* const* argv);
int run_cli(const std::vector<std::string>& args);

std::string tool_version();

}  // namespace icf
