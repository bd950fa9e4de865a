#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace gridsched::cli {

enum ExitCode : int {
    kOk = 0,
    kInvalidDag = 2,
    kUsage = 64,
    kInputError = 66,  // unreadable, malformed or unusable input files
    kInternal = 70,    // the simulation disagreed with its own plan
};

/// Runs the command line `args` (without the program name). Normal output goes to `out`,
/// diagnostics and trace lines to `err`.
int cli_main(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace gridsched::cli
