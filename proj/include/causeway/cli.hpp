#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace causeway {

// Exit codes of the command-line tool.
enum ExitCode : int {
    kExitOk = 0,
    kExitInput = 1,           // usage, parse and model errors
    kExitNonIdentifiable = 2,
    kExitInsufficientData = 3,  // empty strata, missing cells, degenerate resamples, unrecoverable targets
};

// Runs one subcommand; `args` excludes the program name. Results go to `out`,
// diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace causeway
