#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rvpipe {

// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitDiagnostics = 1;  // assembly errors, bad usage, unreadable files
inline constexpr int kExitFault = 2;        // runtime fault, or input required but unavailable
inline constexpr int kExitCycleLimit = 3;

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace rvpipe
