#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace flip {

enum class ErrorCode {
    ConfigParse,
    ConfigInvalid,
    DimensionMismatch,
    ZeroScalar,
    NotStable,
    OnExceptionalLocus,
    OnCenter,
    NotOnBoundary,
    OutOfDomain,
    NoRoot,
    DegenerateDerivative,
    DegenerateBranch,
    NoConvergence,
    BoundViolated,
    InvalidArgument,
};

constexpr std::string_view to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::ConfigParse: return "ConfigParse";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ZeroScalar: return "ZeroScalar";
    case ErrorCode::NotStable: return "NotStable";
    case ErrorCode::OnExceptionalLocus: return "OnExceptionalLocus";
    case ErrorCode::OnCenter: return "OnCenter";
    case ErrorCode::NotOnBoundary: return "NotOnBoundary";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::NoRoot: return "NoRoot";
    case ErrorCode::DegenerateDerivative: return "DegenerateDerivative";
    case ErrorCode::DegenerateBranch: return "DegenerateBranch";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::BoundViolated: return "BoundViolated";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

/// Exception carrying a machine-readable code alongside the message.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code)
    {
    }

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace flip
