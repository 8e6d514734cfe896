#ifndef MAGTRAP_CLI_HPP
#define MAGTRAP_CLI_HPP

#include <iosfwd>

namespace magtrap {

/// Exit codes of the command-line front end.
enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitUsage = 2 };

/**
 * Parses argv and runs one command:
 *   modes | couplings | spectrum | table1 | table3 | cnot | teleport | verify
 *
 * Reports go to `out` (or --output), diagnostics to `err`.
 */
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace magtrap

#endif
