#pragma once

// Closed-loop scenario runner: leader maneuver generator, relative kinematics,
// both control channels and the follower plant, stepped at a fixed rate.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "igc/angles.hpp"
#include "igc/bearing_igc.hpp"
#include "igc/range_igc.hpp"
#include "igc/relative_kinematics.hpp"
#include "igc/vehicle_dynamics.hpp"

namespace igc {

enum class LeaderKind { AscendingLoiter, Lazy8, Constant, Tabulated };

const char* to_string(LeaderKind kind);

struct TabulatedRate {
  double t = 0.0;
  double gamma_dot = 0.0;  // [rad/s]
  double chi_dot = 0.0;    // [rad/s]
  friend bool operator==(const TabulatedRate&, const TabulatedRate&) = default;
};

struct LeaderProfile {
  LeaderKind kind = LeaderKind::Constant;
  double V = 25.0;
  Eigen::Vector3d pos0 = Eigen::Vector3d::Zero();
  Degrees gamma0;
  Degrees chi0;
  double loiter_chi_rate = 0.1;        // [rad/s]
  std::string table_path;              // tabulated profiles only
  std::vector<TabulatedRate> table;    // sorted by t

  friend bool operator==(const LeaderProfile&, const LeaderProfile&) = default;
};

/// Leader point-mass state; speed is constant and lives in the profile.
struct LeaderState {
  Eigen::Vector3d pos = Eigen::Vector3d::Zero();
  double gamma = 0.0;
  double chi = 0.0;
};

LeaderState leader_initial_state(const LeaderProfile& profile);
LeaderState leader_derivative(const LeaderProfile& profile, const LeaderState& state,
                              double t);
AgentKinematics leader_kinematics(const LeaderProfile& profile, const LeaderState& state);

struct FollowerInit {
  Eigen::Vector3d pos = Eigen::Vector3d::Zero();
  double V = 25.0;
  Degrees gamma;
  Degrees chi;
  bool trim = true;  // derive alpha and rotor speed from a level-flight balance
  Degrees alpha, beta, mu;
  double p = 0.0, q = 0.0, r = 0.0;
  double omega = 0.0;

  friend bool operator==(const FollowerInit&, const FollowerInit&) = default;
};

struct FormationTargets {
  double r_d = 50.0;
  Degrees sigma_fd_gamma;
  Degrees sigma_fd_chi;
  Degrees ebar_gamma;
  Degrees ebar_chi;

  friend bool operator==(const FormationTargets&, const FormationTargets&) = default;
};

/// Bounded additive sinusoids per derivative channel; phases and frequencies
/// come from `seed`.
struct DisturbanceSpec {
  std::uint64_t seed = 0;
  double speed = 0.0;     // on V' [m/s^2]
  double attitude = 0.0;  // on gamma', chi', mu', alpha', beta' [rad/s]
  double rate = 0.0;      // on p', q', r' [rad/s^2]
  double rotor = 0.0;     // on omega' [rad/s^2]

  bool active() const { return speed != 0.0 || attitude != 0.0 || rate != 0.0 || rotor != 0.0; }
  friend bool operator==(const DisturbanceSpec&, const DisturbanceSpec&) = default;
};

/// Evaluates the disturbance of `spec` at time t.
Disturbance disturbance_at(const DisturbanceSpec& spec, double t);

struct SimSettings {
  double dt = 0.005;
  double t_final = 120.0;
  int log_decimation = 10;
  double band_range = 2.0;   // [m]
  Degrees band_angle{3.0};
  DisturbanceSpec disturbance;

  friend bool operator==(const SimSettings&, const SimSettings&) = default;
};

struct OutputSettings {
  std::string trajectory;
  std::string metrics;
  friend bool operator==(const OutputSettings&, const OutputSettings&) = default;
};

/// Bearing-channel gains as configured; angles are turned into radians by
/// make_bearing_gains.
struct BearingGainConfig {
  Eigen::Vector2d K0{0.3, 0.2};
  Eigen::Vector3d K1{1.2, 1.2, 1.2};
  Eigen::Vector3d K2{1.5, 1.5, 1.5};
  double k0 = 0.3, k1 = 5.0, k2 = 2.0;
  Eigen::Vector3d tau1{0.2, 0.2, 0.2};
  Eigen::Vector3d tau2{0.2, 0.2, 0.2};
  double eps_norm = 0.3;
  double w2 = 0.01;
  Degrees alpha_max{20.0};
  double d_bar0 = 0.0, d_bar1 = 0.0, d_bar2 = 0.0;

  friend bool operator==(const BearingGainConfig&, const BearingGainConfig&) = default;
};

struct ScenarioConfig {
  std::string name = "scenario";
  VehicleParams vehicle;
  Degrees max_deflection{45.0};
  RangeGains range;
  BearingGainConfig bearing;
  LeaderProfile leader;
  FollowerInit follower;
  FormationTargets formation;
  SimSettings sim;
  OutputSettings output;

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

BearingGains make_bearing_gains(const ScenarioConfig& config);

/// Checks every config invariant, including that the initial bearing errors
/// are strictly inside the barrier. Throws Error.
void validate_scenario(const ScenarioConfig& config);

/// Formation-feasibility problems worth reporting; never fatal.
std::vector<std::string> feasibility_warnings(const ScenarioConfig& config);

/// Follower state at t = 0 (trimmed when requested).
AircraftState initial_follower_state(const ScenarioConfig& config);

/// Surfaces that zero the body-rate accelerations and the throttle that holds
/// the current rotor speed.
ActuatorCommand trim_command(const AircraftState& state, const VehicleParams& params,
                             const GammaSet& gammas);

/// One logged sample. Flags are stored as 0/1.
struct TrajectoryRow {
  double t = 0.0;
  double leader_x = 0.0, leader_y = 0.0, leader_z = 0.0;
  double leader_V = 0.0, leader_gamma = 0.0, leader_chi = 0.0;
  double V = 0.0, gamma = 0.0, chi = 0.0, mu = 0.0, alpha = 0.0, beta = 0.0;
  double p = 0.0, q = 0.0, r = 0.0, omega = 0.0;
  double x = 0.0, y = 0.0, z = 0.0;
  double range = 0.0, gamma_L = 0.0, chi_L = 0.0, r_dot = 0.0;
  double e_r = 0.0, e_gamma = 0.0, e_chi = 0.0;
  double range_s1 = 0.0, range_s2 = 0.0, range_x1_tilde = 0.0, range_x2_tilde = 0.0;
  double v_cmd = 0.0, thrust_cmd = 0.0, omega_cmd = 0.0;
  double g0 = 0.0, g1 = 0.0, p_r = 0.0;
  double s1_alpha = 0.0, s1_beta = 0.0, s1_mu = 0.0;
  double s2_p = 0.0, s2_q = 0.0, s2_r = 0.0;
  double x1t_alpha = 0.0, x1t_beta = 0.0, x1t_mu = 0.0;
  double x2t_p = 0.0, x2t_q = 0.0, x2t_r = 0.0;
  double bl_gamma = 0.0, bl_chi = 0.0;
  double alpha_cmd = 0.0, mu_cmd = 0.0;
  double g0_gamma = 0.0, g0_chi = 0.0;
  double throttle = 0.0, aileron = 0.0, elevator = 0.0, rudder = 0.0;
  double cos_sigma_f = 0.0, cos_sigma_l = 0.0;
  double throttle_sat = 0.0, surface_sat = 0.0, speed_cmd_sat = 0.0;
  double thrust_sat = 0.0, alpha_cmd_sat = 0.0;

  friend bool operator==(const TrajectoryRow&, const TrajectoryRow&) = default;
};

struct TrajectoryColumn {
  const char* name;  // with unit suffix
  double TrajectoryRow::*field;
};

std::span<const TrajectoryColumn> trajectory_columns();

struct FaultRecord {
  double t = 0.0;
  std::string code;
  std::string guard;
  std::string message;
  friend bool operator==(const FaultRecord&, const FaultRecord&) = default;
};

struct TrajectoryLog {
  std::vector<TrajectoryRow> rows;
  std::optional<FaultRecord> fault;
  std::uint64_t config_hash = 0;
  std::uint64_t disturbance_seed = 0;
  std::vector<std::string> warnings;
};

struct SettlingResult {
  std::optional<double> time;  // empty if never settled
  double max_after = 0.0;      // max |error| from the settling time on
};

struct MetricsReport {
  SettlingResult range, elevation, azimuth;
  std::optional<double> settled_all;  // latest of the three
  double band_range = 0.0, band_angle = 0.0;
  double min_margin_gamma = 0.0, min_margin_chi = 0.0;
  double behind_fraction = 0.0;  // rows with cos(sigma_l) > 0
  double min_cos_sigma_f_after = 0.0;
  double max_speed_mismatch_after = 0.0;  // max |V_f - V_l| after settling
  double speed_relation_residual = 0.0;   // max |V_f cos s_f - V_l cos s_l| where |r'| < 1e-3
  std::size_t speed_relation_samples = 0;
  double throttle_sat_duty = 0.0, surface_sat_duty = 0.0;
  double speed_cmd_sat_duty = 0.0, thrust_sat_duty = 0.0, alpha_cmd_sat_duty = 0.0;
  std::size_t rows = 0;
  double t_end = 0.0;
  bool faulted = false;
  std::string fault_guard;
};

struct MetricBands {
  double range = 2.0;  // [m]
  double angle = deg2rad(3.0);  // [rad]
  double ebar_gamma = 0.0, ebar_chi = 0.0;  // [rad]
};

MetricBands metric_bands(const ScenarioConfig& config);

MetricsReport compute_metrics(const TrajectoryLog& log, const MetricBands& bands);

/// Settling time of one error series: first t after which |e| <= band holds
/// until the end of the series.
SettlingResult settling(std::span<const double> t, std::span<const double> err,
                        double band);

struct ScenarioResult {
  TrajectoryLog log;
  MetricsReport metrics;
};

/// Runs the closed loop to t_final or the first fault. Faults are recorded in
/// the log, never thrown; config problems are thrown as Error.
ScenarioResult run_scenario(const ScenarioConfig& config);

/// Gain-condition samples reconstructed from a log.
std::vector<RangeGainSample> range_gain_samples(const TrajectoryLog& log);
std::vector<BearingGainSample> bearing_gain_samples(const TrajectoryLog& log);

struct GainVerification {
  GainReport range;
  GainReport bearing;
  FeasibilityReport feasibility;
  std::optional<FaultRecord> fault;  // of the sampling run, if it aborted
};

/// Runs the scenario to sample the state-dependent terms, then checks both
/// gain sets and the formation feasibility.
GainVerification verify_scenario(const ScenarioConfig& config);

}  // namespace igc
