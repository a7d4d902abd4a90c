#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dimer {

/// Exit status categories of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,
  kExitValidation = 3,
  kExitNumeric = 4,
  kExitIo = 5,
};

/// Runs one CLI invocation. `args` excludes the program name. Normal output
/// (help, the one-line summary) goes to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace dimer
