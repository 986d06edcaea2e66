#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "splinenas/error.hpp"

namespace splinenas::cli {

enum ExitCode : int {
    kOk = 0,
    kUsage = 2,
    kStateViolation = 3,
    kNumericFailure = 4,
    kEvaluatorFailure = 5,
};

ExitCode exit_code_for(ErrorKind kind) noexcept;

/// Runs one command. Line one of `out` is a single-line JSON record; any
/// following lines are a human-readable summary. Errors go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace splinenas::cli
