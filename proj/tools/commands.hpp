#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace invlab::cli {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int { kOk = 0, kValidationError = 2, kNumericError = 3 };

/// Runs one invocation; args[0] is the program name. Documents go to `out`
/// (or to --out files), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace invlab::cli
