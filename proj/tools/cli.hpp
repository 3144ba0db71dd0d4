#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace gcl::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kInputError = 1;
inline constexpr int kInfeasible = 2;
inline constexpr int kPropertyFailure = 3;

/// Runs one command line; `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gcl::cli
