#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tdapipe {

/// Exit codes of the tdapipe executable.
enum ExitCode : int { kOk = 0, kUsage = 1, kDataError = 2, kInternal = 3 };

/// Runs the command line `args` (without the program name). Results go to
/// `out`, progress and diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tdapipe
