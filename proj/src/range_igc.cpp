#include "igc/range_igc.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "igc/error.hpp"

namespace igc {

void RangeGains::validate() const {
  const struct {
    const char* name;
    double value;
  } positive[] = {{"kp0", K0},   {"kp1", K1},   {"kp2", K2},  {"ks0", k0},
                  {"ks1", k1},   {"ks2", k2},   {"tau1", tau1}, {"tau2", tau2},
                  {"phi", phi},  {"w1", w1},    {"v_cmd_min", v_cmd_min}};
  for (const auto& p : positive) {
    if (!(p.value > 0.0)) {
      throw Error(ErrorCode::Config, std::string("gains.range.") + p.name,
                  std::string("gains.range.") + p.name + " must be positive");
    }
  }
  if (!(v_cmd_max > v_cmd_min)) {
    throw Error(ErrorCode::Config, "gains.range.v_cmd_max",
                "gains.range.v_cmd_max must exceed v_cmd_min");
  }
}

RangeTerms range_terms(const AgentKinematics& leader, const AircraftState& f,
                       const RelativeState& rel, const ForceMoment& fm,
                       const VehicleParams& pr) {
  check_divisor_guards(f);
  const double sgL = std::sin(rel.gamma_L), cgL = std::cos(rel.gamma_L);

  RangeTerms t;
  t.f0 = leader.V * (sgL * std::sin(leader.gamma) +
                     cgL * std::cos(leader.gamma) * std::cos(rel.chi_L - leader.chi));
  t.g0 = -(sgL * std::sin(f.gamma) +
           cgL * std::cos(f.gamma) * std::cos(rel.chi_L - f.chi));
  if (!(std::abs(t.g0) >= kRangeControllabilityGuard)) {
    throw Error(ErrorCode::LossOfControllability, "g0_range",
                "follower velocity is orthogonal to the line of sight");
  }
  t.f1 = (fm.forces.side * std::sin(f.beta) - fm.forces.drag * std::cos(f.beta)) /
             pr.mass -
         pr.gravity * std::sin(f.gamma);
  t.g1 = std::cos(f.alpha) * std::cos(f.beta) / pr.mass;
  // Rotor acceleration split into its throttle-free part and throttle gain.
  t.g2 = pr.KQ * pr.V_max / (pr.R_motor * pr.Jp);
  t.f2 = motor_derivative(f.omega, 0.0, f.V, pr);
  return t;
}

double mean_value_slope(double omega, double omega_d, double V,
                        const VehicleParams& params) {
  const ThrustQuadratic q = thrust_quadratic(V, params);
  const double mid = 0.5 * (omega + omega_d);
  return 2.0 * q.A * mid + q.B;
}

double smooth_sign(double x, double phi) { return std::clamp(x / phi, -1.0, 1.0); }

ThrustLimits thrust_limits(double V, const VehicleParams& params) {
  const double omega_max = params.V_max / params.KV;
  return {propeller(V, 0.0, params).thrust, propeller(V, omega_max, params).thrust};
}

RangeStepResult range_control_step(RangeCtrlState& ctrl, const RangeTerms& t,
                                   const RangeMeasurement& meas, double dt,
                                   const RangeGains& k,
                                   const VehicleParams& params) {
  if (!(dt > 0.0)) {
    throw Error(ErrorCode::Config, "dt", "control step must be positive");
  }
  RangeStepResult out;
  RangeDiagnostics& d = out.diag;
  d.e_r = meas.e_r;

  // Desired speed.
  const double x1d_raw =
      (-t.f0 - k.K0 * meas.e_r - k.k0 * smooth_sign(meas.e_r, k.phi)) / t.g0;
  d.x1d = std::clamp(x1d_raw, k.v_cmd_min, k.v_cmd_max);
  d.speed_cmd_saturated = d.x1d != x1d_raw;

  if (!ctrl.initialized) ctrl.x1c = d.x1d;
  d.x1c_dot = (d.x1d - ctrl.x1c) / k.tau1;
  d.s1 = meas.V - ctrl.x1c;
  d.x1_tilde = ctrl.x1c - d.x1d;

  // Desired thrust, kept inside what the rotor can produce.
  const double thrust_raw =
      (-t.f1 - k.K1 * d.s1 - k.k1 * smooth_sign(d.s1, k.phi) + d.x1c_dot) / t.g1;
  const ThrustLimits lim = thrust_limits(meas.V, params);
  d.thrust_d = std::clamp(thrust_raw, lim.min, lim.max);
  d.thrust_saturated = d.thrust_d != thrust_raw;
  d.x2d = invert_thrust(d.thrust_d, meas.V, params);

  if (!ctrl.initialized) ctrl.x2c = d.x2d;
  d.x2c_dot = (d.x2d - ctrl.x2c) / k.tau2;
  d.s2 = meas.omega - ctrl.x2c;
  d.x2_tilde = ctrl.x2c - d.x2d;

  const double throttle_raw =
      (-t.f2 - k.K2 * d.s2 - k.k2 * smooth_sign(d.s2, k.phi) + d.x2c_dot) / t.g2;
  out.throttle = std::clamp(throttle_raw, 0.0, 1.0);
  d.throttle_saturated = out.throttle != throttle_raw;

  ctrl.x1c += dt * d.x1c_dot;
  ctrl.x2c += dt * d.x2c_dot;
  ctrl.initialized = true;
  return out;
}

bool GainReport::all_passed() const {
  return std::all_of(conditions.begin(), conditions.end(), [](const GainCondition& c) {
    return c.informational || c.passed;
  });
}

const GainCondition* GainReport::find(const std::string& name) const {
  for (const auto& c : conditions) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

GainReport verify_range_gains(const RangeGains& k,
                              const std::vector<RangeGainSample>& samples) {
  if (samples.empty()) {
    throw Error(ErrorCode::Config, "samples", "gain verification needs samples");
  }
  double worst_k0 = INFINITY, worst_k1 = INFINITY;
  for (const auto& s : samples) {
    worst_k0 = std::min(worst_k0, k.K0 - (s.g0 * s.g0 / 2.0 + k.w1));
    const double gp = s.g1 * s.P_r;
    worst_k1 = std::min(worst_k1, k.K1 - (gp * gp / 2.0 + 1.0 + k.w1));
  }
  GainReport rep;
  auto add = [&rep](std::string name, double margin, bool info, std::string note) {
    rep.conditions.push_back({std::move(name), margin, margin > 0.0, info, std::move(note)});
  };
  add("range.K0 > g0^2/2 + w1", worst_k0, false,
      worst_k0 > 0.0 ? "" : "K0 below the sufficient bound; convergence is not certified by this check");
  add("range.K1 > (g1 P_r)^2/2 + 1 + w1", worst_k1, false, "");
  add("range.K2 > 1 + w1", k.K2 - (1.0 + k.w1), false, "");
  add("range.1/tau1 > 3/2 + w1", 1.0 / k.tau1 - (1.5 + k.w1), false, "");
  add("range.1/tau2 > 3/2 + w1", 1.0 / k.tau2 - (1.5 + k.w1), false, "");
  // Robust gains are checked in the form the Lyapunov derivative needs
  // (k_i > |d_i|), using the configured disturbance-bound estimates.
  const char* note = "uses configured d_bar estimate; the printed condition k > 1/d_bar differs";
  add("range.k0 > d_bar0", k.k0 - k.d_bar0, true, note);
  add("range.k1 > d_bar1", k.k1 - k.d_bar1, true, note);
  add("range.k2 > d_bar2", k.k2 - k.d_bar2, true, note);
  return rep;
}

}  // namespace igc
