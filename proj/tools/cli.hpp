#pragma once

#include <ostream>

#include "timexplain/error.hpp"

namespace timexplain::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitModel = 4;

/// Exit status for a library error: 4 for model and protocol failures, 2 for
/// invalid parameters, 3 for everything caused by input data.
int exit_code(ErrorKind kind) noexcept;

/// Runs the command line `argv` (argv[0] is the program name). Diagnostics
/// go to `err`, one line each.
int run(int argc, const char* const* argv, std::ostream& err);

}  // namespace timexplain::cli
