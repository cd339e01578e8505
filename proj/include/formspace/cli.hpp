#pragma once

#include <ostream>

namespace formspace::cli {

/// Exit codes of the command-line front-end.
inline constexpr int kExitOk = 0;
inline constexpr int kExitBadInput = 2;
inline constexpr int kExitNoConvergence = 3;

/// Runs one command line. Report records go to `out` (one JSON object per
/// line), diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace formspace::cli
