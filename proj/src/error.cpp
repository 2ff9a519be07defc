#include "rlocus/error.hpp"

namespace rlocus {

const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::DegeneratePolynomial: return "DegeneratePolynomial";
        case ErrorCode::InvalidPlant: return "InvalidPlant";
        case ErrorCode::InvalidRegion: return "InvalidRegion";
        case ErrorCode::SingularPoint: return "SingularPoint";
        case ErrorCode::PoleOrZeroOnBoundary: return "PoleOrZeroOnBoundary";
        case ErrorCode::BiProperGainCapViolated: return "BiProperGainCapViolated";
        case ErrorCode::DegenerateCrossing: return "DegenerateCrossing";
        case ErrorCode::BranchOnBoundary: return "BranchOnBoundary";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::NoConvergence: return "NoConvergence";
        case ErrorCode::SingularJacobian: return "SingularJacobian";
        case ErrorCode::StepUnderflow: return "StepUnderflow";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

}  // namespace rlocus
