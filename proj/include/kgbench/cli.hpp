#pragma once

#include <iosfwd>

namespace kgbench::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

// Entry point for the kgbench binary. Returns 0 on success, 1 when validation
// finds violations or a contract error is raised, 2 on usage errors. Data goes
// to `out`, diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace kgbench::cli
