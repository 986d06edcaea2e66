#include "splinenas/error.hpp"

namespace splinenas {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::NonFiniteInput: return "NonFiniteInput";
        case ErrorKind::RankDeficient: return "RankDeficient";
        case ErrorKind::InvalidSpace: return "InvalidSpace";
        case ErrorKind::OutOfBox: return "OutOfBox";
        case ErrorKind::DegenerateGeometry: return "DegenerateGeometry";
        case ErrorKind::DuplicatePoints: return "DuplicatePoints";
        case ErrorKind::NumericallyUnstable: return "NumericallyUnstable";
        case ErrorKind::DimensionTooLarge: return "DimensionTooLarge";
        case ErrorKind::InvalidConfig: return "InvalidConfig";
        case ErrorKind::FitFailed: return "FitFailed";
        case ErrorKind::NoAdmissiblePoint: return "NoAdmissiblePoint";
        case ErrorKind::UnexpectedPoint: return "UnexpectedPoint";
        case ErrorKind::NonFiniteMeasurement: return "NonFiniteMeasurement";
        case ErrorKind::Inadmissible: return "Inadmissible";
        case ErrorKind::ShrinkNotAllowed: return "ShrinkNotAllowed";
        case ErrorKind::PendingOutstanding: return "PendingOutstanding";
        case ErrorKind::StudyFinished: return "StudyFinished";
        case ErrorKind::EvaluatorFailed: return "EvaluatorFailed";
        case ErrorKind::IoError: return "IoError";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::VersionMismatch: return "VersionMismatch";
        case ErrorKind::InvariantViolation: return "InvariantViolation";
        case ErrorKind::Locked: return "Locked";
        case ErrorKind::UnknownFixture: return "UnknownFixture";
        case ErrorKind::UnknownBenchmark: return "UnknownBenchmark";
        case ErrorKind::EvalTimeout: return "EvalTimeout";
        case ErrorKind::EvalNonZeroExit: return "EvalNonZeroExit";
        case ErrorKind::EvalUnparseable: return "EvalUnparseable";
        case ErrorKind::BadDimensionNames: return "BadDimensionNames";
    }
    return "Unknown";
}

}  // namespace splinenas
