#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace canamrf::cli {

/// Process exit codes.
enum ExitCode : int {
    kSuccess = 0,
    kUsageError = 1,
    kDataError = 2,
    kNumericalFailure = 3,
};

/// Threshold below which grad-check reports success.
inline constexpr double kGradCheckTolerance = 1e-4;

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name. Records go to `out` as "key=value" lines, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace canamrf::cli
