#pragma once

#include <iosfwd>

namespace sparsereg::cli {

/// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kUsage = 1,          // bad flags, bad config, unreadable input
  kCoherenceGate = 2,  // s exceeds the admissible sparsity
  kSignalGate = 3,     // rho <= c1 r or c1 <= 2 c2
  kRowEnergyGate = 4,  // c'-hat exceeds the cap
  kSolverFailure = 5,
};

/// Parses argv and runs one subcommand. Results go to `out`, diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sparsereg::cli
