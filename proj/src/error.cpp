#include "nilmax/error.hpp"

namespace nilmax {

const char* error_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::Ok: return "Ok";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::DegenerateMetric: return "DegenerateMetric";
        case ErrorCode::BoundaryIndex: return "BoundaryIndex";
        case ErrorCode::TruncationInsufficient: return "TruncationInsufficient";
        case ErrorCode::BigCellViolation: return "BigCellViolation";
        case ErrorCode::RegularityViolation: return "RegularityViolation";
        case ErrorCode::StepUnstable: return "StepUnstable";
        case ErrorCode::HolomorphicPoint: return "HolomorphicPoint";
        case ErrorCode::TooCloseToCall: return "TooCloseToCall";
        case ErrorCode::DegenerateBoundary: return "DegenerateBoundary";
        case ErrorCode::DegenerateDenominator: return "DegenerateDenominator";
        case ErrorCode::Unclassified: return "Unclassified";
        case ErrorCode::SchemaError: return "SchemaError";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

}  // namespace nilmax
