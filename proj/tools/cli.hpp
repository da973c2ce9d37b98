#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bsharp::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kInput = 3, kNumeric = 4 };

/// Runs the command line `args` (without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bsharp::cli
