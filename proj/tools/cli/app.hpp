#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace vmdkit::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitNumeric = 4;

/// Runs the command line `args` (without the program name). Progress goes to
/// `out`, error messages to `err`; returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace vmdkit::cli
