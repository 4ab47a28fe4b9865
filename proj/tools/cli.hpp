#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace topovox::cli {

enum ExitCode : int { kOk = 0, kUserError = 1, kInternalError = 2 };

/// Runs `topovox <args...>` (args excludes the program name) and returns the
/// process exit code. Normal output goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace topovox::cli
