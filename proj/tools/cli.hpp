#pragma once

#include <ostream>

namespace prpmi::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNoIncumbent = 3;
inline constexpr int kExitInfeasible = 4;

// Parses and runs one command line. Data goes to out, logs to err.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace prpmi::cli
