#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace chainlab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

const char* tool_version();

/// Parses `args` (without the program name) and runs one subcommand. Results go
/// to `out` unless --out is given; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace chainlab::cli
