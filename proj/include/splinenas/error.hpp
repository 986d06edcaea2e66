#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace splinenas {

enum class ErrorKind {
    // linalg
    NonFiniteInput,
    RankDeficient,
    // paramspace
    InvalidSpace,
    OutOfBox,
    // spline
    DegenerateGeometry,
    DuplicatePoints,
    NumericallyUnstable,
    // halton_search
    DimensionTooLarge,
    // driver
    InvalidConfig,
    FitFailed,
    NoAdmissiblePoint,
    UnexpectedPoint,
    NonFiniteMeasurement,
    Inadmissible,
    ShrinkNotAllowed,
    PendingOutstanding,
    StudyFinished,
    EvaluatorFailed,
    // persistence_io
    IoError,
    ParseError,
    VersionMismatch,
    InvariantViolation,
    Locked,
    UnknownFixture,
    UnknownBenchmark,
    EvalTimeout,
    EvalNonZeroExit,
    EvalUnparseable,
    // cli
    BadDimensionNames,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure surfaced by the library carries a machine-checkable kind.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace splinenas
