#pragma once

// Batch front end. run() parses argv, dispatches one command and writes the
// report to --output (or `out` when no path is given). Diagnostics go to `err`.
//
// Exit codes: 0 success, 2 invalid parameters, 3 solver did not converge,
// 4 internal error.

#include <iosfwd>
#include <span>
#include <string>

namespace gby::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitNoConvergence = 3;
inline constexpr int kExitInternal = 4;

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace gby::cli
