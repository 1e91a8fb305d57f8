#pragma once

// Leader-follower geometry in spherical coordinates about the follower: range,
// LOS elevation/azimuth, their rates, and the bearing angles of either vehicle
// with respect to the LOS.

#include <Eigen/Core>

namespace igc {

/// Point-mass kinematic state of either vehicle.
struct AgentKinematics {
  Eigen::Vector3d pos = Eigen::Vector3d::Zero();  // NED [m]
  double V = 0.0;      // [m/s]
  double gamma = 0.0;  // flight path angle [rad]
  double chi = 0.0;    // heading [rad]

  /// Inertial velocity, NED.
  Eigen::Vector3d velocity() const;
};

struct RelativeState {
  double r = 0.0;        // range [m]
  double gamma_L = 0.0;  // LOS elevation [rad], positive when the leader is above
  double chi_L = 0.0;    // LOS azimuth [rad], in [-pi, pi)
};

struct RelativeRates {
  double r_dot = 0.0;
  double gamma_L_dot = 0.0;
  double chi_L_dot = 0.0;
};

struct BearingAngles {
  double sigma_gamma = 0.0;  // elevation bearing [rad]
  double sigma_chi = 0.0;    // azimuth bearing [rad], in [-pi, pi)
  double cos_sigma = 1.0;    // cosine of the 3-D bearing
};

inline constexpr double kMinRange = 0.1;
inline constexpr double kLosGuard = 1e-3;

/// Throws Error(DegenerateGeometry) when the vehicles are closer than
/// kMinRange or the LOS is within kLosGuard of vertical.
RelativeState relative_state(const AgentKinematics& leader,
                             const AgentKinematics& follower);

RelativeRates relative_rates(const AgentKinematics& leader,
                             const AgentKinematics& follower,
                             const RelativeState& rel);

BearingAngles bearing_angles(double gamma, double chi, const RelativeState& rel);

inline constexpr double kAbeamTolerance = 1e-12;

/// True when the follower is behind the leader, i.e. the leader's bearing
/// satisfies cos(sigma_l) > 0 (beyond kAbeamTolerance).
bool behind_predicate(const BearingAngles& leader_bearing);

/// Feasibility of a formation target against the bearing-error bounds: the
/// follower provably stays behind the leader only when all conditions hold.
struct FeasibilityReport {
  double azimuth_margin = 0.0;   // pi/2 - (|sigma_fd_chi| + ebar_chi)
  double zeta_star = 0.0;        // acos(tan^2((|sigma_fd_chi| + ebar_chi)/2)), NaN if undefined
  double elevation_margin = 0.0; // (zeta* - ebar_gamma) - |sigma_fd_gamma|
  double ebar_gamma_margin = 0.0;// zeta* - ebar_gamma
  bool azimuth_ok = false;
  bool elevation_ok = false;
  bool ebar_gamma_ok = false;

  bool feasible() const { return azimuth_ok && elevation_ok && ebar_gamma_ok; }
};

FeasibilityReport feam_feasibility(double sigma_fd_gamma, double sigma_fd_chi,
                                   double ebar_gamma, double ebar_chi);

}  // namespace igc
