#pragma once

#include <iosfwd>

namespace multimatch {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitResource = 3;

// Entry point of the `multimatch` tool. Results and help go to `out`,
// diagnostics and logs to `err`.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace multimatch
