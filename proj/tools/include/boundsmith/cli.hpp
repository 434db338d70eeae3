#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace boundsmith {

/// Exit codes of the `boundsmith` tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitModel = 2,
  kExitTimeout = 3,
};

/// Runs the tool with `args` (program name excluded). Scenario documents go to `out`,
/// summaries and diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace boundsmith
