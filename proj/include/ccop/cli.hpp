#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ccop {

/// Exit codes of the command-line tool.
enum ExitCode : int {
    kExitOk = 0,
    kExitInput = 2,          // unreadable or malformed input, bad arguments
    kExitIndeterminate = 3,  // numerical borderline case or degenerate point (report still written)
    kExitNotCompact = 4,     // Morse analysis without compact_feasible
};

/// Runs the tool in-process; args exclude the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ccop
