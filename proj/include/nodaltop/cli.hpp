#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nodaltop {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerificationFailed = 1;
inline constexpr int kExitAmbiguousLocus = 2;
inline constexpr int kExitUsage = 64;

/// Runs one command line (args excludes the program name). Human output and
/// JSON go to `out`, diagnostics to `err`; the return value is the exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nodaltop
