#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace epsbias::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCertification = 1;
inline constexpr int kExitStructural = 2;
inline constexpr int kExitResource = 3;

/// Runs one command line (without the program name). Summaries go to `out`,
/// diagnostics to `err`; the return value is the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace epsbias::cli
