#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace simpcoll::cli {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int {
  kOk = 0,
  kInputError = 1,
  kDetected = 2,  // paradox or non-collapsibility found
};

/// Parse `args` (without the program name), dispatch one verb and write the
/// report to `out`. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out);

}  // namespace simpcoll::cli
