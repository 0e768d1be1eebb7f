#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace genraven::cli {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kDataError = 2,
  kGenerationFailure = 3,
};

/// Runs the tool; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace genraven::cli
