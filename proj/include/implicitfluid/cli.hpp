#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace ifluid {

/// Process exit codes of the `ifluid` tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 2,    // bad input, configuration, or solver failure
  kExitViolation = 3,  // a checked property does not hold
};

/// Runs the command line `args` (without the program name) and returns the
/// exit code. Normal output goes to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ifluid
