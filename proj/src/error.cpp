#include "igc/error.hpp"

namespace igc {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Config: return "config";
    case ErrorCode::Parse: return "parse";
    case ErrorCode::Io: return "io";
    case ErrorCode::SingularState: return "singular_state";
    case ErrorCode::DegenerateGeometry: return "degenerate_geometry";
    case ErrorCode::LossOfControllability: return "loss_of_controllability";
    case ErrorCode::InfeasibleThrust: return "infeasible_thrust";
    case ErrorCode::InfeasibleInitialCondition: return "infeasible_initial_condition";
    case ErrorCode::BarrierViolation: return "barrier_violation";
    case ErrorCode::ActuationSingularity: return "actuation_singularity";
  }
  return "unknown";
}

}  // namespace igc
