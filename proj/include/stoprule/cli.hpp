#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace stoprule::cli {

enum ExitCode : int {
  kOk = 0,
  kPropertyViolation = 1,  ///< `check` found a failing property
  kUsage = 2,              ///< bad flags, unknown subcommand, invalid input
  kCapacity = 3,
  kNumericalAnomaly = 4,
};

/// Runs one command line (args exclude the program name). Reports go to
/// `out`; structured error objects go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace stoprule::cli
