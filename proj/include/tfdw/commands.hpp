#pragma once

// Command-line front end.  Exit codes: 0 all assertions passed, 1 assertion
// violation, 2 usage error, 3 numerical failure.

#include <iosfwd>
#include <string>
#include <vector>

namespace tfdw::cli {

enum ExitCode : int { kOk = 0, kViolation = 1, kUsage = 2, kNumerical = 3 };

/// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace tfdw::cli
