#include "bff/error.h"

namespace bff {

const char* errorCodeName(ErrorCode code) {
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::NonManifold: return "NonManifold";
    case ErrorCode::NotADisk: return "NotADisk";
    case ErrorCode::DegenerateFace: return "DegenerateFace";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::AngleSumViolation: return "AngleSumViolation";
    case ErrorCode::NonPositiveLength: return "NonPositiveLength";
    case ErrorCode::WindingMismatch: return "WindingMismatch";
    case ErrorCode::ConeSumViolation: return "ConeSumViolation";
    case ErrorCode::ConeNotReachable: return "ConeNotReachable";
    case ErrorCode::AlreadyOpenWithCuts: return "AlreadyOpenWithCuts";
    case ErrorCode::NoConvergence: return "NoConvergence";
    }
    return "Unknown";
}

} // namespace bff
