#include "tfe/errors.hpp"

namespace tfe {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::BalancedRegime: return "BalancedRegime";
        case ErrorKind::NonIntegrable: return "NonIntegrable";
        case ErrorKind::Singular: return "Singular";
        case ErrorKind::NegativeD: return "NegativeD";
        case ErrorKind::NoConvergence: return "NoConvergence";
        case ErrorKind::DegenerateStart: return "DegenerateStart";
        case ErrorKind::UnsupportedN: return "UnsupportedN";
        case ErrorKind::WrongRegime: return "WrongRegime";
        case ErrorKind::ResonantN: return "ResonantN";
        case ErrorKind::NonIntegrableCorrection: return "NonIntegrableCorrection";
        case ErrorKind::BlowUp: return "BlowUp";
        case ErrorKind::NonPositiveHeight: return "NonPositiveHeight";
        case ErrorKind::ZeroSlope: return "ZeroSlope";
        case ErrorKind::IntervalCollapse: return "IntervalCollapse";
        case ErrorKind::StepSizeUnderflow: return "StepSizeUnderflow";
        case ErrorKind::InsufficientData: return "InsufficientData";
        case ErrorKind::NoDecay: return "NoDecay";
        case ErrorKind::GridMismatch: return "GridMismatch";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::ValidationError: return "ValidationError";
        case ErrorKind::IoError: return "IoError";
    }
    return "Unknown";
}

}  // namespace tfe
