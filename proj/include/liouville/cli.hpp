#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace liouville::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kVerificationFailure = 1;
inline constexpr int kUsageError = 2;
inline constexpr int kSearchExhausted = 3;

// args excludes the program name: {"find-matrix", "--n", "2", ...}. The
// JSON report goes to --out when given, otherwise to out.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace liouville::cli
