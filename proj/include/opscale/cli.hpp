#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace opscale::cli {

/// Exit codes shared by all commands.
enum ExitCode : int {
  kOk = 0,
  kFailure = 1,      // I/O, parse or argument errors
  kNotSolved = 2,    // Diverged, MaxIters or NoSolution
  kOverBudget = 3,   // spectral budget refusal
};

/// Runs the command line `args` (args[0] is the program name) and returns the
/// exit code. Normal output goes to `out`, diagnostics and warnings to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace opscale::cli
