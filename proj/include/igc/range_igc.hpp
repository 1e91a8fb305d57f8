#pragma once

// Throttle channel: dynamic-surface controller driving the range error to zero
// through the speed -> thrust -> rotor-speed cascade.

#include <optional>
#include <string>
#include <vector>

#include "igc/relative_kinematics.hpp"
#include "igc/vehicle_dynamics.hpp"

namespace igc {

struct RangeGains {
  double K0 = 0.2, K1 = 0.6, K2 = 1.5;   // proportional gains
  double k0 = 0.1, k1 = 0.3, k2 = 0.6;   // robust-term gains
  double tau1 = 0.1, tau2 = 0.1;         // filter time constants [s]
  double phi = 0.05;                     // boundary layer of the smoothed signum
  double w1 = 0.01;                      // margin used by the gain checker
  double v_cmd_min = 15.0;               // desired-speed limits [m/s]
  double v_cmd_max = 40.0;
  // Disturbance-bound estimates for the informational robust-gain check.
  double d_bar0 = 0.0, d_bar1 = 0.0, d_bar2 = 0.0;

  /// Throws Error(Config) if any gain is non-positive.
  void validate() const;
  friend bool operator==(const RangeGains&, const RangeGains&) = default;
};

/// Strict-feedback decomposition of the range channel:
///   e_r'  = f0 + g0 V_f
///   V_f'  = f1 + g1 T
///   Om_p' = f2 + g2 delta_t
struct RangeTerms {
  double f0 = 0.0, g0 = 0.0;
  double f1 = 0.0, g1 = 0.0;
  double f2 = 0.0, g2 = 0.0;
};

inline constexpr double kRangeControllabilityGuard = 1e-3;

/// Throws Error(LossOfControllability) when |g0| < 1e-3 (follower velocity
/// orthogonal to the LOS).
RangeTerms range_terms(const AgentKinematics& leader,
                       const AircraftState& follower, const RelativeState& rel,
                       const ForceMoment& fm, const VehicleParams& params);

/// Slope of the thrust curve at the midpoint between omega and omega_d. For a
/// thrust quadratic in rotor speed this makes
///   T(omega) - T(omega_d) = P_r (omega - omega_d)
/// exact.
double mean_value_slope(double omega, double omega_d, double V,
                        const VehicleParams& params);

/// Boundary-layer replacement for sign(x): clamp(x / phi, -1, 1).
double smooth_sign(double x, double phi);

struct RangeCtrlState {
  double x1c = 0.0;  // filtered desired speed [m/s]
  double x2c = 0.0;  // filtered desired rotor speed [rad/s]
  bool initialized = false;
};

struct RangeDiagnostics {
  double e_r = 0.0;
  double x1d = 0.0;       // desired speed
  double thrust_d = 0.0;  // desired thrust after saturation
  double x2d = 0.0;       // desired rotor speed
  double s1 = 0.0, s2 = 0.0;
  double x1_tilde = 0.0, x2_tilde = 0.0;  // filtered minus desired
  double x1c_dot = 0.0, x2c_dot = 0.0;
  bool speed_cmd_saturated = false;
  bool thrust_saturated = false;
  bool throttle_saturated = false;
};

struct RangeStepResult {
  double throttle = 0.0;
  RangeDiagnostics diag;
};

struct RangeMeasurement {
  double e_r = 0.0;
  double V = 0.0;      // current airspeed
  double omega = 0.0;  // current rotor speed
};

/// One control update of period dt. Filters are advanced by explicit Euler
/// after the command is formed; on the first call they are seeded with the
/// desired values.
RangeStepResult range_control_step(RangeCtrlState& ctrl, const RangeTerms& terms,
                                   const RangeMeasurement& meas, double dt,
                                   const RangeGains& gains,
                                   const VehicleParams& params);

/// Thrust attainable at airspeed V: [T(V, 0), T(V, V_max / K_V)].
struct ThrustLimits {
  double min = 0.0, max = 0.0;
};
ThrustLimits thrust_limits(double V, const VehicleParams& params);

struct RangeGainSample {
  double g0 = 0.0;
  double g1 = 0.0;
  double P_r = 0.0;
};

struct GainCondition {
  std::string name;
  double margin = 0.0;  // worst (lhs - rhs) over the samples; > 0 passes
  bool passed = false;
  bool informational = false;  // depends on unknown disturbance bounds
  std::string note;
};

struct GainReport {
  std::vector<GainCondition> conditions;

  /// True if every non-informational condition holds.
  bool all_passed() const;
  const GainCondition* find(const std::string& name) const;
};

GainReport verify_range_gains(const RangeGains& gains,
                              const std::vector<RangeGainSample>& samples);

}  // namespace igc
