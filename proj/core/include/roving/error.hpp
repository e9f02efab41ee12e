#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace roving {

enum class ErrorCode {
    RowSumError,
    SingularRouting,
    NegativeParameter,
    NegativeArgument,
    PoleDetected,
    NotNormalized,
    ZeroMeanDistribution,
    NoConvergence,
    IndeterminateScalar,
    ImpossibleCondition,
    NoInternalArrivals,
    NoExternalArrivals,
    ZeroSwitchover,
    DeadQueue,
    UnstableSystem,
    ModelMismatch,
    InvalidConfig,
};

[[nodiscard]] std::string_view to_string(ErrorCode code) noexcept;

/// Single exception type for the library; `code()` identifies the failure.
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

}  // namespace roving
