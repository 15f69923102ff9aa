#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace vfield::cli {

inline constexpr const char* kToolName = "vfield-lab";
inline constexpr const char* kToolVersion = "0.1.0";

/// Environment variable naming a default JSON config file.
inline constexpr const char* kConfigEnv = "VFIELD_LAB_CONFIG";

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kConfigError = 2,
  kNonConvergence = 3,
  kInvariantViolation = 4,
};

/// Runs one command. `args` excludes the program name. Reports go to `out`
/// unless --out names a file; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace vfield::cli
