#pragma once

#include <exception>
#include <iosfwd>

namespace wgm {

/// Process exit status of each failure class.
enum ExitCode : int {
    kExitOk = 0,
    kExitOther = 1,
    kExitFormat = 2,
    kExitDomain = 3,
    kExitPrecondition = 4,
    kExitNumeric = 5,
};

[[nodiscard]] int exit_code_for(const std::exception& e);

/// Parses the command line and runs one subcommand. Diagnostics go to `err`, summaries to `out`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace wgm
