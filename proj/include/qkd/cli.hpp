#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace qkd::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitComputation = 1;
inline constexpr int kExitUsage = 2;

// Runs one command. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qkd::cli
