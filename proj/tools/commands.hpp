#pragma once

#include <iosfwd>

namespace andor::cli {

/// Default output directory when --out is not given.
inline constexpr const char* kOutDirEnv = "ANDOR_OUT_DIR";
inline constexpr const char* kFallbackOutDir = "andor_out";

enum ExitCode : int {
  kOk = 0,
  kCheckFailed = 1,  ///< a verification check or per-file step failed
  kUsage = 2,        ///< bad flags or arguments
  kMissingFile = 3,
  kBadInput = 4,     ///< malformed or inconsistent input files
};

/// Parses argv and runs one subcommand. Never throws.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace andor::cli
