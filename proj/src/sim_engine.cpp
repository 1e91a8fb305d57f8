#include "igc/sim_engine.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include <Eigen/LU>

#include "igc/error.hpp"
#include "igc/integrator.hpp"

namespace igc {

const char* to_string(LeaderKind kind) {
  switch (kind) {
    case LeaderKind::AscendingLoiter: return "ascending_loiter";
    case LeaderKind::Lazy8: return "lazy8";
    case LeaderKind::Constant: return "constant";
    case LeaderKind::Tabulated: return "tabulated";
  }
  return "constant";
}

LeaderState leader_initial_state(const LeaderProfile& profile) {
  return {profile.pos0, profile.gamma0.rad(), profile.chi0.rad()};
}

namespace {

TabulatedRate interpolate(const std::vector<TabulatedRate>& table, double t) {
  if (table.empty()) return {};
  if (t <= table.front().t) return table.front();
  if (t >= table.back().t) return table.back();
  const auto hi = std::upper_bound(table.begin(), table.end(), t,
                                   [](double v, const TabulatedRate& r) { return v < r.t; });
  const auto lo = hi - 1;
  const double w = (t - lo->t) / (hi->t - lo->t);
  return {t, lo->gamma_dot + w * (hi->gamma_dot - lo->gamma_dot),
          lo->chi_dot + w * (hi->chi_dot - lo->chi_dot)};
}

}  // namespace

LeaderState leader_derivative(const LeaderProfile& profile, const LeaderState& s,
                              double t) {
  LeaderState d;
  const double V = profile.V;
  d.pos = Eigen::Vector3d(V * std::cos(s.gamma) * std::cos(s.chi),
                          V * std::cos(s.gamma) * std::sin(s.chi), -V * std::sin(s.gamma));
  switch (profile.kind) {
    case LeaderKind::Constant:
      break;
    case LeaderKind::AscendingLoiter:
      d.chi = profile.loiter_chi_rate;
      break;
    case LeaderKind::Lazy8: {
      const double cg = std::cos(s.gamma);
      if (!(std::abs(cg) > kDivisorGuard)) {
        throw Error(ErrorCode::SingularState, "cos_gamma_l",
                    "lazy-8 leader reached vertical flight");
      }
      d.gamma = std::sin(t / 10.0) / 100.0;
      d.chi = std::sin(t / 20.0) / (12.0 * cg);
      break;
    }
    case LeaderKind::Tabulated: {
      const TabulatedRate rate = interpolate(profile.table, t);
      d.gamma = rate.gamma_dot;
      d.chi = rate.chi_dot;
      break;
    }
  }
  return d;
}

AgentKinematics leader_kinematics(const LeaderProfile& profile, const LeaderState& s) {
  return {s.pos, profile.V, s.gamma, s.chi};
}

namespace {

// Per-channel frequency and phase, drawn once from the seed. Raw engine output
// is scaled by hand so the sequence does not depend on the standard library's
// distribution implementation.
struct DisturbanceWaves {
  std::array<double, AircraftState::kSize> freq{};
  std::array<double, AircraftState::kSize> phase{};
};

DisturbanceWaves disturbance_waves(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto unit = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  DisturbanceWaves w;
  for (std::size_t i = 0; i < w.freq.size(); ++i) {
    w.freq[i] = 0.1 + 0.9 * unit();
    w.phase[i] = 2.0 * kPi * unit();
  }
  return w;
}

}  // namespace

Disturbance disturbance_at(const DisturbanceSpec& spec, double t) {
  Disturbance d{};
  if (!spec.active()) return d;
  const DisturbanceWaves w = disturbance_waves(spec.seed);
  // Layout follows AircraftState::to_vector; position channels stay clean.
  const std::array<double, 10> amp = {spec.speed,    spec.attitude, spec.attitude,
                                      spec.attitude, spec.attitude, spec.attitude,
                                      spec.rate,     spec.rate,     spec.rate,
                                      spec.rotor};
  for (std::size_t i = 0; i < amp.size(); ++i) {
    d[i] = amp[i] * std::sin(w.freq[i] * t + w.phase[i]);
  }
  return d;
}

BearingGains make_bearing_gains(const ScenarioConfig& c) {
  BearingGains g;
  g.K0 = c.bearing.K0;
  g.K1 = c.bearing.K1;
  g.K2 = c.bearing.K2;
  g.k0 = c.bearing.k0;
  g.k1 = c.bearing.k1;
  g.k2 = c.bearing.k2;
  g.tau1 = c.bearing.tau1;
  g.tau2 = c.bearing.tau2;
  g.eps_norm = c.bearing.eps_norm;
  g.w2 = c.bearing.w2;
  g.alpha_max = c.bearing.alpha_max.rad();
  g.max_deflection = c.max_deflection.rad();
  g.ebar_gamma = c.formation.ebar_gamma.rad();
  g.ebar_chi = c.formation.ebar_chi.rad();
  g.d_bar0 = c.bearing.d_bar0;
  g.d_bar1 = c.bearing.d_bar1;
  g.d_bar2 = c.bearing.d_bar2;
  return g;
}

namespace {

[[noreturn]] void config_error(const std::string& key, const std::string& what) {
  throw Error(ErrorCode::Config, key, key + ": " + what);
}

}  // namespace

void validate_scenario(const ScenarioConfig& c) {
  c.vehicle.validate();
  c.range.validate();
  make_bearing_gains(c).validate();

  if (!(c.sim.dt > 0.0 && c.sim.dt <= 0.02)) config_error("sim.dt", "must lie in (0, 0.02] s");
  if (!(c.sim.t_final > 0.0)) config_error("sim.t_final", "must be positive");
  if (c.sim.log_decimation < 1) config_error("sim.log_decimation", "must be >= 1");
  if (!(c.sim.band_range > 0.0)) config_error("sim.band_range", "must be positive");
  if (!(c.sim.band_angle.deg > 0.0)) config_error("sim.band_angle_deg", "must be positive");
  if (!(c.formation.r_d > 0.0)) config_error("formation.r_d", "must be positive");
  if (!(c.leader.V > 0.0)) config_error("leader.v", "must be positive");
  if (!(std::abs(c.leader.gamma0.deg) < 90.0)) config_error("leader.gamma_deg", "must lie in (-90, 90)");
  if (!(c.follower.V > 0.0)) config_error("follower.v", "must be positive");
  if (!(std::abs(c.follower.gamma.deg) < 90.0)) config_error("follower.gamma_deg", "must lie in (-90, 90)");
  if (c.leader.kind == LeaderKind::Tabulated) {
    if (c.leader.table.size() < 2) config_error("leader.table", "needs at least two rows");
    for (std::size_t i = 1; i < c.leader.table.size(); ++i) {
      if (!(c.leader.table[i].t > c.leader.table[i - 1].t)) {
        config_error("leader.table", "times must be strictly increasing");
      }
    }
  }
  if (!c.follower.trim && !(std::abs(c.follower.beta.deg) < 90.0)) {
    config_error("follower.beta_deg", "must lie in (-90, 90)");
  }

  const AgentKinematics leader = leader_kinematics(c.leader, leader_initial_state(c.leader));
  const AgentKinematics follower{c.follower.pos, c.follower.V, c.follower.gamma.rad(),
                                 c.follower.chi.rad()};
  const RelativeState rel = relative_state(leader, follower);
  const BearingErrors e = bearing_errors(
      follower.gamma, follower.chi, rel, c.formation.sigma_fd_gamma.rad(),
      c.formation.sigma_fd_chi.rad(), c.formation.ebar_gamma.rad(), c.formation.ebar_chi.rad());
  require_inside_barrier(e);
}

AircraftState initial_follower_state(const ScenarioConfig& c) {
  const FollowerInit& f = c.follower;
  AircraftState s;
  s.pos = f.pos;
  s.V = f.V;
  s.gamma = f.gamma.rad();
  s.chi = f.chi.rad();
  if (!f.trim) {
    s.alpha = f.alpha.rad();
    s.beta = f.beta.rad();
    s.mu = f.mu.rad();
    s.p = f.p;
    s.q = f.q;
    s.r = f.r;
    s.omega = f.omega;
    return s;
  }
  // Lift (with the thrust component) balances gravity normal to the path,
  // thrust balances drag plus gravity along it; surfaces zero the rate
  // accelerations. Each pass refines alpha, rotor speed and surfaces together.
  const VehicleParams& pr = c.vehicle;
  const GammaSet gammas = inertia_gammas(pr);
  const double Q = dynamic_pressure(s.V, pr);
  const double weight = pr.mass * pr.gravity;
  const ThrustLimits lim = thrust_limits(s.V, pr);
  double thrust = 0.0;
  s.alpha = (weight * std::cos(s.gamma) / Q - pr.CL0) / pr.CLalpha;
  for (int pass = 0; pass < 50; ++pass) {
    s.omega = invert_thrust(std::clamp(thrust, lim.min, lim.max), s.V, pr);
    const ActuatorCommand cmd = trim_command(s, pr, gammas);
    const AeroForces forces = aero_forces(s, cmd, pr);
    const double lift_deficit =
        weight * std::cos(s.gamma) - thrust * std::sin(s.alpha) - forces.lift;
    s.alpha += lift_deficit / (Q * pr.CLalpha);
    thrust = (forces.drag + weight * std::sin(s.gamma)) / std::cos(s.alpha);
  }
  s.omega = invert_thrust(std::clamp(thrust, lim.min, lim.max), s.V, pr);
  return s;
}

ActuatorCommand trim_command(const AircraftState& s, const VehicleParams& pr,
                             const GammaSet& gammas) {
  // Rate accelerations are affine in the surfaces: build the map from three
  // unit deflections and solve for zero.
  const double torque = propeller(s.V, s.omega, pr).torque;
  auto rates = [&](const ActuatorCommand& cmd) {
    return body_rate_derivative(s, aero_moments(s, cmd, pr), torque, pr, gammas);
  };
  ActuatorCommand cmd;
  const Eigen::Vector3d base = rates(cmd);
  Eigen::Matrix3d jac;
  for (int i = 0; i < 3; ++i) {
    ActuatorCommand unit;
    (i == 0 ? unit.aileron : i == 1 ? unit.elevator : unit.rudder) = 1.0;
    jac.col(i) = rates(unit) - base;
  }
  const Eigen::Vector3d surf = jac.fullPivLu().solve(-base);
  cmd.aileron = surf(0);
  cmd.elevator = surf(1);
  cmd.rudder = surf(2);
  const double throttle_gain = pr.KQ * pr.V_max / (pr.R_motor * pr.Jp);
  cmd.throttle = std::clamp(-motor_derivative(s.omega, 0.0, s.V, pr) / throttle_gain, 0.0, 1.0);
  return cmd;
}

namespace {

constexpr std::array<TrajectoryColumn, 64> kColumns = {{
    {"t_s", &TrajectoryRow::t},
    {"leader_x_m", &TrajectoryRow::leader_x},
    {"leader_y_m", &TrajectoryRow::leader_y},
    {"leader_z_m", &TrajectoryRow::leader_z},
    {"leader_v_mps", &TrajectoryRow::leader_V},
    {"leader_gamma_rad", &TrajectoryRow::leader_gamma},
    {"leader_chi_rad", &TrajectoryRow::leader_chi},
    {"v_f_mps", &TrajectoryRow::V},
    {"gamma_f_rad", &TrajectoryRow::gamma},
    {"chi_f_rad", &TrajectoryRow::chi},
    {"mu_f_rad", &TrajectoryRow::mu},
    {"alpha_f_rad", &TrajectoryRow::alpha},
    {"beta_f_rad", &TrajectoryRow::beta},
    {"p_radps", &TrajectoryRow::p},
    {"q_radps", &TrajectoryRow::q},
    {"r_radps", &TrajectoryRow::r},
    {"omega_p_radps", &TrajectoryRow::omega},
    {"x_m", &TrajectoryRow::x},
    {"y_m", &TrajectoryRow::y},
    {"z_m", &TrajectoryRow::z},
    {"r_m", &TrajectoryRow::range},
    {"gamma_los_rad", &TrajectoryRow::gamma_L},
    {"chi_los_rad", &TrajectoryRow::chi_L},
    {"r_dot_mps", &TrajectoryRow::r_dot},
    {"e_r_m", &TrajectoryRow::e_r},
    {"e_gamma_rad", &TrajectoryRow::e_gamma},
    {"e_chi_rad", &TrajectoryRow::e_chi},
    {"range_s1_mps", &TrajectoryRow::range_s1},
    {"range_s2_radps", &TrajectoryRow::range_s2},
    {"range_x1_tilde_mps", &TrajectoryRow::range_x1_tilde},
    {"range_x2_tilde_radps", &TrajectoryRow::range_x2_tilde},
    {"v_cmd_mps", &TrajectoryRow::v_cmd},
    {"thrust_cmd_n", &TrajectoryRow::thrust_cmd},
    {"omega_cmd_radps", &TrajectoryRow::omega_cmd},
    {"g0_range", &TrajectoryRow::g0},
    {"g1_range_per_kg", &TrajectoryRow::g1},
    {"p_r_n_s", &TrajectoryRow::p_r},
    {"s1_alpha_rad", &TrajectoryRow::s1_alpha},
    {"s1_beta_rad", &TrajectoryRow::s1_beta},
    {"s1_mu_rad", &TrajectoryRow::s1_mu},
    {"s2_p_radps", &TrajectoryRow::s2_p},
    {"s2_q_radps", &TrajectoryRow::s2_q},
    {"s2_r_radps", &TrajectoryRow::s2_r},
    {"x1_tilde_alpha_rad", &TrajectoryRow::x1t_alpha},
    {"x1_tilde_beta_rad", &TrajectoryRow::x1t_beta},
    {"x1_tilde_mu_rad", &TrajectoryRow::x1t_mu},
    {"x2_tilde_p_radps", &TrajectoryRow::x2t_p},
    {"x2_tilde_q_radps", &TrajectoryRow::x2t_q},
    {"x2_tilde_r_radps", &TrajectoryRow::x2t_r},
    {"barrier_gamma_per_rad2", &TrajectoryRow::bl_gamma},
    {"barrier_chi_per_rad2", &TrajectoryRow::bl_chi},
    {"alpha_cmd_rad", &TrajectoryRow::alpha_cmd},
    {"mu_cmd_rad", &TrajectoryRow::mu_cmd},
    {"g0_gamma_per_s", &TrajectoryRow::g0_gamma},
    {"g0_chi_per_s", &TrajectoryRow::g0_chi},
    {"delta_t", &TrajectoryRow::throttle},
    {"delta_a_rad", &TrajectoryRow::aileron},
    {"delta_e_rad", &TrajectoryRow::elevator},
    {"delta_r_rad", &TrajectoryRow::rudder},
    {"cos_sigma_f", &TrajectoryRow::cos_sigma_f},
    {"cos_sigma_l", &TrajectoryRow::cos_sigma_l},
    {"throttle_sat", &TrajectoryRow::throttle_sat},
    {"surface_sat", &TrajectoryRow::surface_sat},
    {"speed_cmd_sat", &TrajectoryRow::speed_cmd_sat},
}};

constexpr std::array<TrajectoryColumn, 2> kFlagColumns = {{
    {"thrust_sat", &TrajectoryRow::thrust_sat},
    {"alpha_cmd_sat", &TrajectoryRow::alpha_cmd_sat},
}};

const std::vector<TrajectoryColumn>& all_columns() {
  static const std::vector<TrajectoryColumn> cols = [] {
    std::vector<TrajectoryColumn> v(kColumns.begin(), kColumns.end());
    v.insert(v.end(), kFlagColumns.begin(), kFlagColumns.end());
    return v;
  }();
  return cols;
}

constexpr std::size_t kFollowerSize = AircraftState::kSize;
constexpr std::size_t kPlantSize = kFollowerSize + 5;
using PlantVector = std::array<double, kPlantSize>;

PlantVector pack(const AircraftState& f, const LeaderState& l) {
  PlantVector x{};
  const auto fv = f.to_vector();
  std::copy(fv.begin(), fv.end(), x.begin());
  x[kFollowerSize + 0] = l.pos.x();
  x[kFollowerSize + 1] = l.pos.y();
  x[kFollowerSize + 2] = l.pos.z();
  x[kFollowerSize + 3] = l.gamma;
  x[kFollowerSize + 4] = l.chi;
  return x;
}

void unpack(const PlantVector& x, AircraftState& f, LeaderState& l) {
  AircraftState::Vector fv;
  std::copy(x.begin(), x.begin() + kFollowerSize, fv.begin());
  f = AircraftState::from_vector(fv);
  l.pos = Eigen::Vector3d(x[kFollowerSize], x[kFollowerSize + 1], x[kFollowerSize + 2]);
  l.gamma = x[kFollowerSize + 3];
  l.chi = x[kFollowerSize + 4];
}

double flag(bool b) { return b ? 1.0 : 0.0; }

}  // namespace

std::span<const TrajectoryColumn> trajectory_columns() { return all_columns(); }

MetricBands metric_bands(const ScenarioConfig& c) {
  return {c.sim.band_range, c.sim.band_angle.rad(), c.formation.ebar_gamma.rad(),
          c.formation.ebar_chi.rad()};
}

std::vector<std::string> feasibility_warnings(const ScenarioConfig& c) {
  const FeasibilityReport feas =
      feam_feasibility(c.formation.sigma_fd_gamma.rad(), c.formation.sigma_fd_chi.rad(),
                       c.formation.ebar_gamma.rad(), c.formation.ebar_chi.rad());
  std::vector<std::string> out;
  if (!feas.azimuth_ok) {
    out.emplace_back("formation target violates |sigma_fd_chi| + ebar_chi < 90 deg; "
                     "staying behind the leader is not guaranteed");
  } else if (!feas.feasible()) {
    out.emplace_back("formation target violates the elevation feasibility bound");
  }
  return out;
}

ScenarioResult run_scenario(const ScenarioConfig& config) {
  validate_scenario(config);

  const VehicleParams& params = config.vehicle;
  const GammaSet gammas = inertia_gammas(params);
  const BearingGains bgains = make_bearing_gains(config);
  const RangeGains& rgains = config.range;
  const double dt = config.sim.dt;
  const auto steps = static_cast<long long>(std::llround(config.sim.t_final / dt));
  const double sigma_g = config.formation.sigma_fd_gamma.rad();
  const double sigma_c = config.formation.sigma_fd_chi.rad();

  ScenarioResult result;
  TrajectoryLog& log = result.log;
  log.disturbance_seed = config.sim.disturbance.seed;
  log.rows.reserve(static_cast<std::size_t>(steps / config.sim.log_decimation + 1));

  log.warnings = feasibility_warnings(config);

  AircraftState follower = initial_follower_state(config);
  LeaderState leader = leader_initial_state(config.leader);
  RangeCtrlState range_ctrl;
  BearingCtrlState bearing_ctrl;
  ActuatorCommand cmd = trim_command(follower, params, gammas);
  const bool disturbed = config.sim.disturbance.active();

  for (long long k = 0; k <= steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    try {
      const AgentKinematics lk = leader_kinematics(config.leader, leader);
      const AgentKinematics fk{follower.pos, follower.V, follower.gamma, follower.chi};
      const RelativeState rel = relative_state(lk, fk);
      const BearingErrors errors =
          bearing_errors(follower.gamma, follower.chi, rel, sigma_g, sigma_c,
                         bgains.ebar_gamma, bgains.ebar_chi);

      const ForceMoment fm = force_moment(follower, cmd, params);
      const RangeTerms rterms = range_terms(lk, follower, rel, fm, params);
      const RangeStepResult rres = range_control_step(
          range_ctrl, rterms, {rel.r - config.formation.r_d, follower.V, follower.omega},
          dt, rgains, params);
      const BearingTerms bterms = bearing_terms(follower, cmd, lk, rel, params, gammas);
      const BearingStepResult bres =
          bearing_control_step(bearing_ctrl, follower, bterms, errors, dt, bgains);

      cmd = bres.surfaces;
      cmd.throttle = rres.throttle;

      if (k % config.sim.log_decimation == 0) {
        const RelativeRates rates = relative_rates(lk, fk, rel);
        const BearingAngles bf = bearing_angles(follower.gamma, follower.chi, rel);
        const BearingAngles bl = bearing_angles(lk.gamma, lk.chi, rel);
        const RangeDiagnostics& rd = rres.diag;
        const BearingDiagnostics& bd = bres.diag;
        TrajectoryRow row;
        row.t = t;
        row.leader_x = leader.pos.x();
        row.leader_y = leader.pos.y();
        row.leader_z = leader.pos.z();
        row.leader_V = lk.V;
        row.leader_gamma = leader.gamma;
        row.leader_chi = leader.chi;
        row.V = follower.V;
        row.gamma = follower.gamma;
        row.chi = follower.chi;
        row.mu = follower.mu;
        row.alpha = follower.alpha;
        row.beta = follower.beta;
        row.p = follower.p;
        row.q = follower.q;
        row.r = follower.r;
        row.omega = follower.omega;
        row.x = follower.pos.x();
        row.y = follower.pos.y();
        row.z = follower.pos.z();
        row.range = rel.r;
        row.gamma_L = rel.gamma_L;
        row.chi_L = rel.chi_L;
        row.r_dot = rates.r_dot;
        row.e_r = rd.e_r;
        row.e_gamma = errors.e_gamma;
        row.e_chi = errors.e_chi;
        row.range_s1 = rd.s1;
        row.range_s2 = rd.s2;
        row.range_x1_tilde = rd.x1_tilde;
        row.range_x2_tilde = rd.x2_tilde;
        row.v_cmd = rd.x1d;
        row.thrust_cmd = rd.thrust_d;
        row.omega_cmd = rd.x2d;
        row.g0 = rterms.g0;
        row.g1 = rterms.g1;
        row.p_r = mean_value_slope(follower.omega, rd.x2d, follower.V, params);
        row.s1_alpha = bd.s1.x();
        row.s1_beta = bd.s1.y();
        row.s1_mu = bd.s1.z();
        row.s2_p = bd.s2.x();
        row.s2_q = bd.s2.y();
        row.s2_r = bd.s2.z();
        row.x1t_alpha = bd.x1_tilde.x();
        row.x1t_beta = bd.x1_tilde.y();
        row.x1t_mu = bd.x1_tilde.z();
        row.x2t_p = bd.x2_tilde.x();
        row.x2t_q = bd.x2_tilde.y();
        row.x2t_r = bd.x2_tilde.z();
        row.bl_gamma = bd.barrier.x();
        row.bl_chi = bd.barrier.y();
        row.alpha_cmd = bd.x1d.x();
        row.mu_cmd = bd.x1d.z();
        row.g0_gamma = bterms.G0(0, 0);
        row.g0_chi = bterms.G0(1, 1);
        row.throttle = cmd.throttle;
        row.aileron = cmd.aileron;
        row.elevator = cmd.elevator;
        row.rudder = cmd.rudder;
        row.cos_sigma_f = bf.cos_sigma;
        row.cos_sigma_l = bl.cos_sigma;
        row.throttle_sat = flag(rd.throttle_saturated);
        row.surface_sat = flag(bd.surface_saturated);
        row.speed_cmd_sat = flag(rd.speed_cmd_saturated);
        row.thrust_sat = flag(rd.thrust_saturated);
        row.alpha_cmd_sat = flag(bd.alpha_cmd_saturated);
        log.rows.push_back(row);
      }
      if (k == steps) break;

      auto plant = [&](double ts, const PlantVector& x) {
        AircraftState fs;
        LeaderState ls;
        unpack(x, fs, ls);
        Disturbance dist{};
        if (disturbed) dist = disturbance_at(config.sim.disturbance, ts);
        const StateDerivative fd =
            state_derivative(fs, cmd, params, gammas, disturbed ? &dist : nullptr);
        return pack(fd, leader_derivative(config.leader, ls, ts));
      };
      unpack(rk4_step<kPlantSize>(plant, pack(follower, leader), t, dt), follower, leader);
    } catch (const Error& e) {
      log.fault = FaultRecord{t, to_string(e.code()), e.guard(), e.what()};
      break;
    }
  }

  result.metrics = compute_metrics(log, metric_bands(config));
  return result;
}

SettlingResult settling(std::span<const double> t, std::span<const double> err,
                        double band) {
  SettlingResult out;
  if (t.empty()) return out;
  std::size_t first_inside = 0;
  for (std::size_t i = t.size(); i-- > 0;) {
    if (!(std::abs(err[i]) <= band)) {
      first_inside = i + 1;
      break;
    }
  }
  if (first_inside >= t.size()) return out;
  out.time = t[first_inside];
  for (std::size_t i = first_inside; i < t.size(); ++i) {
    out.max_after = std::max(out.max_after, std::abs(err[i]));
  }
  return out;
}

MetricsReport compute_metrics(const TrajectoryLog& log, const MetricBands& bands) {
  MetricsReport m;
  m.band_range = bands.range;
  m.band_angle = bands.angle;
  m.rows = log.rows.size();
  m.faulted = log.fault.has_value();
  if (m.faulted) m.fault_guard = log.fault->guard;
  if (log.rows.empty()) return m;

  const std::size_t n = log.rows.size();
  std::vector<double> t(n), er(n), eg(n), ec(n);
  for (std::size_t i = 0; i < n; ++i) {
    t[i] = log.rows[i].t;
    er[i] = log.rows[i].e_r;
    eg[i] = log.rows[i].e_gamma;
    ec[i] = log.rows[i].e_chi;
  }
  m.t_end = t.back();
  // A faulted run never counts as settled.
  if (!m.faulted) {
    m.range = settling(t, er, bands.range);
    m.elevation = settling(t, eg, bands.angle);
    m.azimuth = settling(t, ec, bands.angle);
    if (m.range.time && m.elevation.time && m.azimuth.time) {
      m.settled_all = std::max({*m.range.time, *m.elevation.time, *m.azimuth.time});
    }
  }

  m.min_margin_gamma = std::numeric_limits<double>::infinity();
  m.min_margin_chi = std::numeric_limits<double>::infinity();
  m.min_cos_sigma_f_after = std::numeric_limits<double>::infinity();
  std::size_t behind = 0, sat_t = 0, sat_s = 0, sat_v = 0, sat_T = 0, sat_a = 0;
  for (const TrajectoryRow& row : log.rows) {
    m.min_margin_gamma = std::min(m.min_margin_gamma, bands.ebar_gamma - std::abs(row.e_gamma));
    m.min_margin_chi = std::min(m.min_margin_chi, bands.ebar_chi - std::abs(row.e_chi));
    behind += row.cos_sigma_l > 0.0;
    sat_t += row.throttle_sat != 0.0;
    sat_s += row.surface_sat != 0.0;
    sat_v += row.speed_cmd_sat != 0.0;
    sat_T += row.thrust_sat != 0.0;
    sat_a += row.alpha_cmd_sat != 0.0;
    if (m.settled_all && row.t >= *m.settled_all) {
      m.min_cos_sigma_f_after = std::min(m.min_cos_sigma_f_after, row.cos_sigma_f);
      m.max_speed_mismatch_after =
          std::max(m.max_speed_mismatch_after, std::abs(row.V - row.leader_V));
      if (std::abs(row.r_dot) < 1e-3) {
        ++m.speed_relation_samples;
        m.speed_relation_residual =
            std::max(m.speed_relation_residual,
                     std::abs(row.V * row.cos_sigma_f - row.leader_V * row.cos_sigma_l));
      }
    }
  }
  const double dn = static_cast<double>(n);
  m.behind_fraction = static_cast<double>(behind) / dn;
  m.throttle_sat_duty = static_cast<double>(sat_t) / dn;
  m.surface_sat_duty = static_cast<double>(sat_s) / dn;
  m.speed_cmd_sat_duty = static_cast<double>(sat_v) / dn;
  m.thrust_sat_duty = static_cast<double>(sat_T) / dn;
  m.alpha_cmd_sat_duty = static_cast<double>(sat_a) / dn;
  if (!m.settled_all) m.min_cos_sigma_f_after = std::numeric_limits<double>::quiet_NaN();
  return m;
}

std::vector<RangeGainSample> range_gain_samples(const TrajectoryLog& log) {
  std::vector<RangeGainSample> out;
  out.reserve(log.rows.size());
  for (const auto& row : log.rows) out.push_back({row.g0, row.g1, row.p_r});
  return out;
}

std::vector<BearingGainSample> bearing_gain_samples(const TrajectoryLog& log) {
  std::vector<BearingGainSample> out;
  out.reserve(log.rows.size());
  for (const auto& row : log.rows) {
    BearingGainSample s;
    s.G0(0, 0) = row.g0_gamma;
    s.G0(1, 1) = row.g0_chi;
    s.alpha = row.alpha;
    s.alpha_d = row.alpha_cmd;
    s.mu = row.mu;
    s.mu_d = row.mu_cmd;
    s.beta = row.beta;
    out.push_back(s);
  }
  return out;
}

GainVerification verify_scenario(const ScenarioConfig& config) {
  const ScenarioResult run = run_scenario(config);
  GainVerification v;
  v.range = verify_range_gains(config.range, range_gain_samples(run.log));
  v.bearing = verify_bearing_gains(make_bearing_gains(config), bearing_gain_samples(run.log));
  v.feasibility = feam_feasibility(config.formation.sigma_fd_gamma.rad(),
                                   config.formation.sigma_fd_chi.rad(),
                                   config.formation.ebar_gamma.rad(), config.formation.ebar_chi.rad());
  v.fault = run.log.fault;
  return v;
}

}  // namespace igc
