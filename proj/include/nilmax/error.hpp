#pragma once

#include <stdexcept>
#include <string>

namespace nilmax {

enum class ErrorCode {
    Ok = 0,
    InvalidArgument,
    DegenerateMetric,
    BoundaryIndex,
    TruncationInsufficient,
    BigCellViolation,
    RegularityViolation,
    StepUnstable,
    HolomorphicPoint,
    TooCloseToCall,
    DegenerateBoundary,
    DegenerateDenominator,
    Unclassified,
    SchemaError,
    ParseError,
    IoError,
};

const char* error_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace nilmax
