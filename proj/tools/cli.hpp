#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace numguard::cli {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
  kOk = 0,
  kUsage = 1,       // invalid flags, malformed input, violated precondition
  kFinding = 2,     // valid run that exhibits the behaviour under study
  kConstruction = 3 // hull construction aborted with a failure report
};

/// Runs `numguard <args...>` (args excludes the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace numguard::cli
