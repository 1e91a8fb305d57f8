#pragma once

// Surface-deflection channel: barrier-constrained dynamic-surface controller
// driving the elevation/azimuth bearing errors to zero through the
// attitude (alpha, beta, mu) -> body-rate (p, q, r) cascade.

#include <Eigen/Core>

#include "igc/range_igc.hpp"
#include "igc/relative_kinematics.hpp"
#include "igc/vehicle_dynamics.hpp"

namespace igc {

struct BearingGains {
  Eigen::Vector2d K0{0.3, 0.2};       // diagonal, on (e_gamma, e_chi)
  Eigen::Vector3d K1{1.2, 1.2, 1.2};  // diagonal, on (alpha, beta, mu)
  Eigen::Vector3d K2{1.5, 1.5, 1.5};  // diagonal, on (p, q, r)
  double k0 = 0.3, k1 = 5.0, k2 = 2.0;
  Eigen::Vector3d tau1{0.2, 0.2, 0.2};
  Eigen::Vector3d tau2{0.2, 0.2, 0.2};
  double ebar_gamma = 0.0, ebar_chi = 0.0;  // barrier bounds [rad]
  double eps_norm = 0.3;       // boundary layer of the unit-vector robust terms
  double w2 = 0.01;            // margin used by the gain checker
  double alpha_max = 0.0;      // |alpha_d| limit [rad]
  double max_deflection = 0.0; // surface limit [rad]
  double d_bar0 = 0.0, d_bar1 = 0.0, d_bar2 = 0.0;

  void validate() const;
  friend bool operator==(const BearingGains&, const BearingGains&) = default;
};

struct BearingErrors {
  double e_gamma = 0.0, e_chi = 0.0;
  double margin_gamma = 0.0, margin_chi = 0.0;  // ebar - |e|

  Eigen::Vector2d vec() const { return {e_gamma, e_chi}; }
};

/// e_gamma = gamma_f - gamma_L - sigma_fd_gamma, e_chi wrapped to [-pi, pi).
BearingErrors bearing_errors(double gamma_f, double chi_f, const RelativeState& rel,
                             double sigma_fd_gamma, double sigma_fd_chi,
                             double ebar_gamma, double ebar_chi);

/// Throws Error(InfeasibleInitialCondition) unless both errors are strictly
/// inside their bounds.
void require_inside_barrier(const BearingErrors& e);

/// diag(1/(ebar_g^2 - e_g^2), 1/(ebar_c^2 - e_c^2)). Throws
/// Error(BarrierViolation) when a bound is reached.
Eigen::Matrix2d barrier_weights(const BearingErrors& e, double ebar_gamma,
                                double ebar_chi);

/// Strict-feedback decomposition of the bearing channel:
///   e'   = f0 + G0 [alpha cos mu, alpha sin mu]
///   x1'  = f1 + G1 [p, q, r]          with x1 = [alpha, beta, mu]
///   x2'  = f2 + G2 [da, de, dr]       with x2 = [p, q, r]
struct BearingTerms {
  Eigen::Vector2d f0 = Eigen::Vector2d::Zero();
  Eigen::Matrix2d G0 = Eigen::Matrix2d::Zero();
  Eigen::Vector3d f1 = Eigen::Vector3d::Zero();
  Eigen::Matrix3d G1 = Eigen::Matrix3d::Zero();
  Eigen::Vector3d f2 = Eigen::Vector3d::Zero();
  Eigen::Matrix3d G2 = Eigen::Matrix3d::Zero();
  double alpha_offset = 0.0;  // lift angle minus alpha
};

inline constexpr double kActuationConditionLimit = 1e8;

/// `cmd` supplies the deflections held from the previous update; they only
/// enter the force terms. Throws on divisor guards and when G2 is numerically
/// singular.
BearingTerms bearing_terms(const AircraftState& state, const ActuatorCommand& cmd,
                           const AgentKinematics& leader, const RelativeState& rel,
                           const VehicleParams& params, const GammaSet& gammas);

/// Lift-channel input matrix alone: diag(Q C_La/(m V), Q C_La/(m V cos gamma)).
Eigen::Matrix2d lift_input_matrix(const AircraftState& state,
                                  const VehicleParams& params);
/// Body-rate to (alpha, beta, mu) rate map.
Eigen::Matrix3d attitude_rate_matrix(double alpha, double beta);
/// Deflection to body-rate acceleration map.
Eigen::Matrix3d deflection_matrix(double V, const VehicleParams& params,
                                  const GammaSet& gammas);

struct AttitudeCommand {
  double alpha = 0.0, beta = 0.0, mu = 0.0;
  bool alpha_clamped = false;
};

/// Polar split of the virtual lift command: the lift angle carries the
/// magnitude with the sign of the first component, |mu| <= pi/2, beta = 0.
/// alpha = lift angle - alpha_offset, then clamped to +-alpha_max.
AttitudeCommand attitude_from_virtual(const Eigen::Vector2d& virtual_cmd,
                                      double alpha_max, double alpha_offset = 0.0);

struct BearingCtrlState {
  Eigen::Vector3d x1c = Eigen::Vector3d::Zero();  // filtered [alpha, beta, mu]
  Eigen::Vector3d x2c = Eigen::Vector3d::Zero();  // filtered [p, q, r]
  bool initialized = false;
};

struct BearingDiagnostics {
  Eigen::Vector2d e = Eigen::Vector2d::Zero();
  Eigen::Vector2d virtual_cmd = Eigen::Vector2d::Zero();
  Eigen::Vector3d x1d = Eigen::Vector3d::Zero();
  Eigen::Vector3d x2d = Eigen::Vector3d::Zero();
  Eigen::Vector3d s1 = Eigen::Vector3d::Zero();
  Eigen::Vector3d s2 = Eigen::Vector3d::Zero();
  Eigen::Vector3d x1_tilde = Eigen::Vector3d::Zero();
  Eigen::Vector3d x2_tilde = Eigen::Vector3d::Zero();
  Eigen::Vector2d barrier = Eigen::Vector2d::Zero();  // diagonal of B_L
  bool alpha_cmd_saturated = false;
  bool surface_saturated = false;
};

struct BearingStepResult {
  ActuatorCommand surfaces;  // throttle left at 0
  BearingDiagnostics diag;
};

BearingStepResult bearing_control_step(BearingCtrlState& ctrl,
                                       const AircraftState& state,
                                       const BearingTerms& terms,
                                       const BearingErrors& errors, double dt,
                                       const BearingGains& gains);

struct BearingGainSample {
  Eigen::Matrix2d G0 = Eigen::Matrix2d::Zero();
  double alpha = 0.0, alpha_d = 0.0;
  double mu = 0.0, mu_d = 0.0;
  double beta = 0.0;
};

/// Linearisation of [alpha cos mu, alpha sin mu] about the midpoint between
/// the actual and desired attitude.
Eigen::Matrix2d virtual_linearisation(double alpha, double alpha_d, double mu,
                                      double mu_d);

GainReport verify_bearing_gains(const BearingGains& gains,
                                const std::vector<BearingGainSample>& samples);

}  // namespace igc
