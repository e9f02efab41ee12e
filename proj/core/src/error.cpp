#include "roving/error.hpp"

namespace roving {

std::string_view to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::RowSumError: return "RowSumError";
    case ErrorCode::SingularRouting: return "SingularRouting";
    case ErrorCode::NegativeParameter: return "NegativeParameter";
    case ErrorCode::NegativeArgument: return "NegativeArgument";
    case ErrorCode::PoleDetected: return "PoleDetected";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::ZeroMeanDistribution: return "ZeroMeanDistribution";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::IndeterminateScalar: return "IndeterminateScalar";
    case ErrorCode::ImpossibleCondition: return "ImpossibleCondition";
    case ErrorCode::NoInternalArrivals: return "NoInternalArrivals";
    case ErrorCode::NoExternalArrivals: return "NoExternalArrivals";
    case ErrorCode::ZeroSwitchover: return "ZeroSwitchover";
    case ErrorCode::DeadQueue: return "DeadQueue";
    case ErrorCode::UnstableSystem: return "UnstableSystem";
    case ErrorCode::ModelMismatch: return "ModelMismatch";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    }
    return "Unknown";
}

}  // namespace roving
