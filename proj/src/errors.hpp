#pragma once

#include <stdexcept>
#include <string>

namespace glf {

enum class ErrorCode {
    InvalidArgument = 1,
    GridMismatch,
    SingularMatrix,
    NonConvergence,
    DomainTooSmall,
    WindowTooNoisy,
    DegenerateRoot,
    EigensolveFailure,
    GammaAtOrigin,
    BranchPoint,
    BorderedSingular,
    QuadratureDivergence,
    FitWindowTooShort,
    SolveFailure,
    GuardViolation,
    PolarSingularity,
    MissingNorm,
    NonPositiveValue,
    TooFewPoints,
    ConfigInvalid,
    IoError,
};

const char* error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

inline void require(bool cond, ErrorCode code, const std::string& message) {
    if (!cond) fail(code, message);
}

}  // namespace glf
