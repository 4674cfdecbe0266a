#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace quickar::cli {

inline constexpr const char* kVersion = "0.1.0";

/// Exit codes of `run`.
enum ExitCode : int { kOk = 0, kUsageError = 1, kDataError = 2 };

/// Parses `args` (args[0] is the program name) and runs one subcommand:
/// build-db, index, search, reformulate or evaluate.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace quickar::cli
