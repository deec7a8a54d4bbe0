#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace trboost::cli {

// Exit codes: 0 success, 2 usage error, 3 data error, 4 numeric infeasibility.
enum ExitCode : int { kOk = 0, kUsage = 2, kData = 3, kNumeric = 4 };

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace trboost::cli
