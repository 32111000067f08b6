#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace driftguard::cli {

/// Process exit codes.
enum ExitCode : int {
    kOk = 0,
    kConfigError = 2,
    kDataError = 3,
    kNumericError = 4,
    kPartialFailure = 5,
};

/// Parses `args` (without the program name), runs the subcommand and maps
/// library errors onto exit codes. Diagnostics go to `err`, summaries to
/// `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace driftguard::cli
