#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace spinwing::cli {

/// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFault = 1;
inline constexpr int kExitUsage = 2;

/// Environment variable naming the default output directory.
inline constexpr const char* kOutDirEnv = "SPINWING_OUT_DIR";

/// Runs the command line `args` (without the program name) and returns the
/// exit code. Normal output goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace spinwing::cli
