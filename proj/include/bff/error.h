#pragma once

#include <stdexcept>
#include <string>

namespace bff {

enum class ErrorCode {
    InvalidArgument = 1,
    ParseError,
    IoError,
    NonManifold,
    NotADisk,
    DegenerateFace,
    NotPositiveDefinite,
    DimensionMismatch,
    AngleSumViolation,
    NonPositiveLength,
    WindingMismatch,
    ConeSumViolation,
    ConeNotReachable,
    AlreadyOpenWithCuts,
    NoConvergence,
};

const char* errorCodeName(ErrorCode code);

// Every failure inside the library surfaces as this exception; the C layer
// converts it into a status code plus a thread-local message.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

} // namespace bff
