#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace fdcov {

/// Exit statuses of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRuntime = 2;

/// Entry point of the `fdcov` tool. `args` excludes the program name.
/// Subcommands: simulate, stat, test, experiment. Diagnostics go to `err`
/// as a single line.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fdcov
