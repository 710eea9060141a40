#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gdst::cli {

enum ExitCode : int {
  kOk = 0,
  kCheckFailed = 1,
  kInputError = 2,
  kCheckpointMismatch = 3,
};

/// Parses `args` (without the program name) and runs the selected command.
/// Output goes to `out`, diagnostics to `err`. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gdst::cli
