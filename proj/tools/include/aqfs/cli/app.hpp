#pragma once

#include <iosfwd>

namespace aqfs::cli {

enum ExitCode : int { kOk = 0, kUserError = 1, kInternalError = 2 };

/// Entry point behind the `aqfs` executable. Precedence of settings, lowest
/// first: built-in defaults, the `--config` JSON file, command-line flags.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace aqfs::cli
