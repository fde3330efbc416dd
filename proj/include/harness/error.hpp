#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace harness {

enum class ErrorCode {
  InvalidArgument,
  AsymmetricKernel,
  NonStochastic,
  SelfLoop,
  RangeViolation,
  DomainMismatch,
  NoConvergence,
  SizeLimit,
  SiteOutsideBox,
  WalkCapExceeded,
  BoundViolated,
  AbsorptionOccurred,
  FactorizationFailure,
  ConfigInvalid,
};

std::string_view error_code_name(ErrorCode code) noexcept;

// Every failure raised by the library carries a code and the module that
// raised it, so messages read "ground_state: SizeLimit: ...".
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string_view module, const std::string& message);

  ErrorCode code() const noexcept { return code_; }
  const std::string& module() const noexcept { return module_; }
  /// Message without the module and code prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string module_;
  std::string detail_;
};

}  // namespace harness
