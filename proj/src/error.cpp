#include "harness/error.hpp"

namespace harness {

std::string_view error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::AsymmetricKernel: return "AsymmetricKernel";
    case ErrorCode::NonStochastic: return "NonStochastic";
    case ErrorCode::SelfLoop: return "SelfLoop";
    case ErrorCode::RangeViolation: return "RangeViolation";
    case ErrorCode::DomainMismatch: return "DomainMismatch";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::SizeLimit: return "SizeLimit";
    case ErrorCode::SiteOutsideBox: return "SiteOutsideBox";
    case ErrorCode::WalkCapExceeded: return "WalkCapExceeded";
    case ErrorCode::BoundViolated: return "BoundViolated";
    case ErrorCode::AbsorptionOccurred: return "AbsorptionOccurred";
    case ErrorCode::FactorizationFailure: return "FactorizationFailure";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, std::string_view module, const std::string& message)
    : std::runtime_error(std::string(module) + ": " + std::string(error_code_name(code)) + ": " +
                         message),
      code_(code),
      module_(module),
      detail_(message) {}

}  // namespace harness
