#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pseudospec::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;
inline constexpr int kExitVerify = 2;

/// Parses args (without the program name) and runs one subcommand.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pseudospec::cli
