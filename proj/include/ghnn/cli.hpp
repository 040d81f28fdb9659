#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ghnn {

/// Exit codes of the ghnn command-line tool.
enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitNotConverged = 2 };

/// Runs the ghnn CLI. args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ghnn
