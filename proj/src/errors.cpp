#include "errors.hpp"

namespace glf {

const char* error_code_name(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::GridMismatch: return "GridMismatch";
        case ErrorCode::SingularMatrix: return "SingularMatrix";
        case ErrorCode::NonConvergence: return "NonConvergence";
        case ErrorCode::DomainTooSmall: return "DomainTooSmall";
        case ErrorCode::WindowTooNoisy: return "WindowTooNoisy";
        case ErrorCode::DegenerateRoot: return "DegenerateRoot";
        case ErrorCode::EigensolveFailure: return "EigensolveFailure";
        case ErrorCode::GammaAtOrigin: return "GammaAtOrigin";
        case ErrorCode::BranchPoint: return "BranchPoint";
        case ErrorCode::BorderedSingular: return "BorderedSingular";
        case ErrorCode::QuadratureDivergence: return "QuadratureDivergence";
        case ErrorCode::FitWindowTooShort: return "FitWindowTooShort";
        case ErrorCode::SolveFailure: return "SolveFailure";
        case ErrorCode::GuardViolation: return "GuardViolation";
        case ErrorCode::PolarSingularity: return "PolarSingularity";
        case ErrorCode::MissingNorm: return "MissingNorm";
        case ErrorCode::NonPositiveValue: return "NonPositiveValue";
        case ErrorCode::TooFewPoints: return "TooFewPoints";
        case ErrorCode::ConfigInvalid: return "ConfigInvalid";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

}  // namespace glf
