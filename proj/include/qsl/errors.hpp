// Error type shared by every qsl module.
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qsl {

enum class ErrorKind {
    NotHermitian,
    NotPSD,
    ConvergenceFailure,
    DimMismatch,
    LengthMismatch,
    InvalidState,
    OffSimplexTangent,
    DivergentDirection,
    OutsideSupport,
    InvalidPovm,
    ZeroProbabilityOutcome,
    IndexOutOfRange,
    DegenerateWithGround,
    ViolationDetected,
    TooManyQubits,
    CrossCheckMismatch,
    DegenerateRegime,
    InvalidArgument,
    ParseError,
    ValidationError,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::NotHermitian: return "NotHermitian";
        case ErrorKind::NotPSD: return "NotPSD";
        case ErrorKind::ConvergenceFailure: return "ConvergenceFailure";
        case ErrorKind::DimMismatch: return "DimMismatch";
        case ErrorKind::LengthMismatch: return "LengthMismatch";
        case ErrorKind::InvalidState: return "InvalidState";
        case ErrorKind::OffSimplexTangent: return "OffSimplexTangent";
        case ErrorKind::DivergentDirection: return "DivergentDirection";
        case ErrorKind::OutsideSupport: return "OutsideSupport";
        case ErrorKind::InvalidPovm: return "InvalidPovm";
        case ErrorKind::ZeroProbabilityOutcome: return "ZeroProbabilityOutcome";
        case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
        case ErrorKind::DegenerateWithGround: return "DegenerateWithGround";
        case ErrorKind::ViolationDetected: return "ViolationDetected";
        case ErrorKind::TooManyQubits: return "TooManyQubits";
        case ErrorKind::CrossCheckMismatch: return "CrossCheckMismatch";
        case ErrorKind::DegenerateRegime: return "DegenerateRegime";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::ValidationError: return "ValidationError";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
    throw Error(kind, what);
}

}  // namespace qsl
