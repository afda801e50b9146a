#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pmrecycle::cli {

/// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kConfigError = 1,
  kInvariantFailure = 2,
  kIoError = 3,
};

/// Parses "start:step:stop" (inclusive) or comma-separated literals.
/// Throws ConfigError.
std::vector<double> parse_grid(const std::string& text);

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pmrecycle::cli
