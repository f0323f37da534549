#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace refauction::cli {

enum ExitCode : int { kOk = 0, kFailed = 1, kUsage = 2 };

/// Entry point behind the `refauction` binary. `args` excludes the program
/// name. Output goes to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace refauction::cli
