#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace trustsim::cli {

enum ExitCode : int { kOk = 0, kAuditFailed = 1, kUsage = 2 };

// args excludes the program name.
int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace trustsim::cli
