#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace pocan {

enum ExitCode : int {
    ExitOk = 0,
    ExitUsage = 1,
    ExitInvalidInput = 2,
    ExitPrecision = 3,
    ExitInternal = 4,
};

/// Runs one `pocan` invocation. args excludes the program name. Reports go
/// to out, diagnostics to err.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pocan
