#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qhist::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;
inline constexpr int kExitNumerical = 2;

/// Runs one invocation. `args` excludes the program name. In json mode
/// exactly one JSON document goes to `out`; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qhist::cli
