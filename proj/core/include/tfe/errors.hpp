#pragma once

#include <stdexcept>
#include <string>

namespace tfe {

enum class ErrorKind {
    InvalidArgument,
    BalancedRegime,
    NonIntegrable,
    Singular,
    NegativeD,
    NoConvergence,
    DegenerateStart,
    UnsupportedN,
    WrongRegime,
    ResonantN,
    NonIntegrableCorrection,
    BlowUp,
    NonPositiveHeight,
    ZeroSlope,
    IntervalCollapse,
    StepSizeUnderflow,
    InsufficientData,
    NoDecay,
    GridMismatch,
    ParseError,
    ValidationError,
    IoError,
};

const char* to_string(ErrorKind kind) noexcept;

/// Exception carrying a machine-readable kind; what() is the human message.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

}  // namespace tfe
