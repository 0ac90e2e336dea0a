#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cmc::cli {

/// Exit codes of the command-line front end.
enum ExitCode : int {
  kOk = 0,
  kValidation = 2,
  kNonConvergence = 3,
  kInvariantViolation = 4,
};

/// Runs one subcommand (geometry, spectrum, index, verify, theorem, sweep).
/// Reports go to `out` unless --output names a file; errors are printed to
/// `err` as a single JSON object.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, char** argv);

}  // namespace cmc::cli
