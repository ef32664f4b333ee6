#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace hypwander::cli {

enum ExitCode : int { kOk = 0, kViolated = 1, kUsage = 2, kNumeric = 3 };

/// Runs one subcommand. `args` excludes the program name. CSV goes to --out when
/// given, otherwise to `out`; the one-line summary always goes to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hypwander::cli
