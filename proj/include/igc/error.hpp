#pragma once

#include <stdexcept>
#include <string>

namespace igc {

enum class ErrorCode {
  Config,
  Parse,
  Io,
  SingularState,
  DegenerateGeometry,
  LossOfControllability,
  InfeasibleThrust,
  InfeasibleInitialCondition,
  BarrierViolation,
  ActuationSingularity,
};

const char* to_string(ErrorCode code) noexcept;

// All library failures are reported through this type. `guard()` names the
// check that tripped (e.g. "cos_beta_f", "barrier.e_chi") so a faulted run can
// be attributed without parsing the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string guard, const std::string& message)
      : std::runtime_error(message), code_(code), guard_(std::move(guard)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& guard() const noexcept { return guard_; }

 private:
  ErrorCode code_;
  std::string guard_;
};

}  // namespace igc
