#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace roving::cli {

enum ExitCode : int {
    kOk = 0,
    kConfigError = 1,
    kUnstable = 2,
    kComparisonFailed = 3,
};

/// Runs `roving` with `args` (program name excluded) and returns the exit code.
/// Tables and diagnostics go to `out` and `err`; files go to --out.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Parses an omega grid: "default", "none", "log:a:b:n", "lin:a:b:n" or "x1,x2,...".
[[nodiscard]] std::vector<double> parse_omega_grid(const std::string& spec);

}  // namespace roving::cli
