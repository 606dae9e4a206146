#pragma once

#include <iosfwd>

namespace treereg::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitVerify = 2;

/// Subcommands: run, verify, gen, snapshot, restore. Returns the exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace treereg::cli
