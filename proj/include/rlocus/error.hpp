#pragma once

#include <stdexcept>
#include <string>

namespace rlocus {

enum class ErrorCode {
    DegeneratePolynomial,
    InvalidPlant,
    InvalidRegion,
    SingularPoint,
    PoleOrZeroOnBoundary,
    BiProperGainCapViolated,
    DegenerateCrossing,
    BranchOnBoundary,
    InvalidArgument,
    NoConvergence,
    SingularJacobian,
    StepUnderflow,
    ParseError,
    IoError,
};

const char* to_string(ErrorCode code);

// Every failure raised by the library carries a code so callers (the CLI in
// particular) can map it to an exit status without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace rlocus
