#include "igc/bearing_igc.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include "igc/angles.hpp"
#include "igc/error.hpp"

namespace igc {

void BearingGains::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0)) {
      throw Error(ErrorCode::Config, std::string("gains.bearing.") + name,
                  std::string("gains.bearing.") + name + " must be positive");
    }
  };
  if (!(K0.minCoeff() > 0.0)) positive(K0.minCoeff(), "kp0");
  if (!(K1.minCoeff() > 0.0)) positive(K1.minCoeff(), "kp1");
  if (!(K2.minCoeff() > 0.0)) positive(K2.minCoeff(), "kp2");
  if (!(tau1.minCoeff() > 0.0)) positive(tau1.minCoeff(), "tau1");
  if (!(tau2.minCoeff() > 0.0)) positive(tau2.minCoeff(), "tau2");
  positive(k0, "ks0");
  positive(k1, "ks1");
  positive(k2, "ks2");
  positive(eps_norm, "eps_norm");
  positive(w2, "w2");
  positive(alpha_max, "alpha_max_deg");
  positive(max_deflection, "max_deflection_deg");
  for (auto [bound, name] : {std::pair{ebar_gamma, "formation.ebar_gamma_deg"},
                             std::pair{ebar_chi, "formation.ebar_chi_deg"}}) {
    if (!(bound > 0.0 && bound <= kPi / 2.0)) {
      throw Error(ErrorCode::Config, name,
                  std::string(name) + " must lie in (0, 90] degrees");
    }
  }
}

BearingErrors bearing_errors(double gamma_f, double chi_f, const RelativeState& rel,
                             double sigma_fd_gamma, double sigma_fd_chi,
                             double ebar_gamma, double ebar_chi) {
  BearingErrors e;
  e.e_gamma = gamma_f - rel.gamma_L - sigma_fd_gamma;
  e.e_chi = wrap_pi(chi_f - rel.chi_L - sigma_fd_chi);
  e.margin_gamma = ebar_gamma - std::abs(e.e_gamma);
  e.margin_chi = ebar_chi - std::abs(e.e_chi);
  return e;
}

void require_inside_barrier(const BearingErrors& e) {
  if (!(e.margin_gamma > 0.0)) {
    throw Error(ErrorCode::InfeasibleInitialCondition, "barrier.e_gamma",
                "initial elevation bearing error is outside its barrier bound");
  }
  if (!(e.margin_chi > 0.0)) {
    throw Error(ErrorCode::InfeasibleInitialCondition, "barrier.e_chi",
                "initial azimuth bearing error is outside its barrier bound");
  }
}

Eigen::Matrix2d barrier_weights(const BearingErrors& e, double ebar_gamma,
                                double ebar_chi) {
  const double dg = ebar_gamma * ebar_gamma - e.e_gamma * e.e_gamma;
  const double dc = ebar_chi * ebar_chi - e.e_chi * e.e_chi;
  if (!(dg > 0.0)) {
    throw Error(ErrorCode::BarrierViolation, "barrier.e_gamma",
                "elevation bearing error reached its barrier bound");
  }
  if (!(dc > 0.0)) {
    throw Error(ErrorCode::BarrierViolation, "barrier.e_chi",
                "azimuth bearing error reached its barrier bound");
  }
  Eigen::Matrix2d B = Eigen::Matrix2d::Zero();
  B(0, 0) = 1.0 / dg;
  B(1, 1) = 1.0 / dc;
  return B;
}

Eigen::Matrix2d lift_input_matrix(const AircraftState& s, const VehicleParams& pr) {
  const double k = dynamic_pressure(s.V, pr) * pr.CLalpha / (pr.mass * s.V);
  Eigen::Matrix2d G = Eigen::Matrix2d::Zero();
  G(0, 0) = k;
  G(1, 1) = k / std::cos(s.gamma);
  return G;
}

Eigen::Matrix3d attitude_rate_matrix(double alpha, double beta) {
  const double sa = std::sin(alpha), ca = std::cos(alpha);
  const double tb = std::tan(beta), cb = std::cos(beta);
  Eigen::Matrix3d G;
  G << -ca * tb, 1.0, -sa * tb,
       sa, 0.0, -ca,
       ca / cb, 0.0, sa / cb;
  return G;
}

Eigen::Matrix3d deflection_matrix(double V, const VehicleParams& pr,
                                  const GammaSet& G) {
  const double bQ = pr.b * dynamic_pressure(V, pr);
  Eigen::Matrix3d M;
  M << G(3) * pr.Clda + G(4) * pr.Cnda, 0.0, G(3) * pr.Cldr + G(4) * pr.Cndr,
       0.0, pr.c * pr.Cmde / (pr.b * pr.Jy), 0.0,
       G(4) * pr.Clda + G(8) * pr.Cnda, 0.0, G(4) * pr.Cldr + G(8) * pr.Cndr;
  return bQ * M;
}

BearingTerms bearing_terms(const AircraftState& s, const ActuatorCommand& cmd,
                           const AgentKinematics& leader, const RelativeState& rel,
                           const VehicleParams& pr, const GammaSet& gammas) {
  // Throws on the V, cos(beta), cos(gamma) guards.
  const StateDerivative xdot = state_derivative(s, cmd, pr, gammas);
  const AgentKinematics follower{s.pos, s.V, s.gamma, s.chi};
  const RelativeRates los = relative_rates(leader, follower, rel);

  BearingTerms t;
  t.G0 = lift_input_matrix(s, pr);
  const Eigen::Vector2d e_dot(xdot.gamma - los.gamma_L_dot, xdot.chi - los.chi_L_dot);
  // The lift channel acts through the lift angle: the actual lift expressed
  // as the angle of attack that produces it on the linear slope. Removing the
  // whole lift (not only the C_La alpha part) keeps f0 free of mu, so the
  // virtual command does not feed back the current roll algebraically.
  const double Q = dynamic_pressure(s.V, pr);
  const double lift_angle = aero_forces(s, cmd, pr).lift / (Q * pr.CLalpha);
  const Eigen::Vector2d lift_part(lift_angle * std::cos(s.mu), lift_angle * std::sin(s.mu));
  t.f0 = e_dot - t.G0 * lift_part;
  // Lift not due to alpha (C_L0, pitch rate, elevator), as an angle.
  t.alpha_offset = lift_angle - s.alpha;

  t.G1 = attitude_rate_matrix(s.alpha, s.beta);
  const Eigen::Vector3d x1_dot(xdot.alpha, xdot.beta, xdot.mu);
  t.f1 = x1_dot - t.G1 * Eigen::Vector3d(s.p, s.q, s.r);

  // Body-rate drift with the deflection contributions removed.
  ActuatorCommand clean = cmd;
  clean.aileron = clean.elevator = clean.rudder = 0.0;
  const AeroMoments m0 = aero_moments(s, clean, pr);
  const double Qp = propeller(s.V, s.omega, pr).torque;
  t.f2 = body_rate_derivative(s, m0, Qp, pr, gammas);
  t.G2 = deflection_matrix(s.V, pr, gammas);

  const Eigen::JacobiSVD<Eigen::Matrix3d> svd(t.G2);
  const auto sv = svd.singularValues();
  if (!(sv(2) > 0.0) || sv(0) / sv(2) > kActuationConditionLimit) {
    throw Error(ErrorCode::ActuationSingularity, "G2_condition",
                "deflection-to-rate map is numerically singular");
  }
  return t;
}

AttitudeCommand attitude_from_virtual(const Eigen::Vector2d& v, double alpha_max,
                                      double alpha_offset) {
  AttitudeCommand out;
  const double mag = std::hypot(v.x(), v.y());
  if (v.x() > 0.0) {
    out.alpha = mag;
    out.mu = std::atan(v.y() / v.x());
  } else if (v.x() < 0.0) {
    out.alpha = -mag;
    out.mu = std::atan(v.y() / v.x());
  } else {
    out.alpha = mag;
    out.mu = v.y() > 0.0 ? kPi / 2.0 : (v.y() < 0.0 ? -kPi / 2.0 : 0.0);
  }
  out.alpha -= alpha_offset;
  const double clamped = std::clamp(out.alpha, -alpha_max, alpha_max);
  out.alpha_clamped = clamped != out.alpha;
  out.alpha = clamped;
  return out;
}

namespace {

Eigen::Vector3d unit_regularised(const Eigen::Vector3d& v, double eps) {
  return v / (v.norm() + eps);
}

}  // namespace

BearingStepResult bearing_control_step(BearingCtrlState& ctrl,
                                       const AircraftState& s,
                                       const BearingTerms& t,
                                       const BearingErrors& errors, double dt,
                                       const BearingGains& k) {
  if (!(dt > 0.0)) {
    throw Error(ErrorCode::Config, "dt", "control step must be positive");
  }
  BearingStepResult out;
  BearingDiagnostics& d = out.diag;

  const Eigen::Matrix2d B = barrier_weights(errors, k.ebar_gamma, k.ebar_chi);
  d.e = errors.vec();
  d.barrier = B.diagonal();
  const Eigen::Vector2d Be = B * d.e;
  const Eigen::Vector2d robust0 = k.k0 * B * d.e / (d.e.norm() + k.eps_norm);
  d.virtual_cmd = t.G0.inverse() * (-t.f0 - robust0 - k.K0.asDiagonal() * Be);

  const AttitudeCommand att = attitude_from_virtual(d.virtual_cmd, k.alpha_max, t.alpha_offset);
  d.alpha_cmd_saturated = att.alpha_clamped;
  d.x1d = Eigen::Vector3d(att.alpha, att.beta, att.mu);

  if (!ctrl.initialized) ctrl.x1c = d.x1d;
  const Eigen::Vector3d x1c_dot = (d.x1d - ctrl.x1c).cwiseQuotient(k.tau1);
  const Eigen::Vector3d x1(s.alpha, s.beta, s.mu);
  d.s1 = x1 - ctrl.x1c;
  d.s1.z() = wrap_pi(d.s1.z());
  d.x1_tilde = ctrl.x1c - d.x1d;

  d.x2d = t.G1.inverse() * (-t.f1 - k.K1.cwiseProduct(d.s1) -
                            k.k1 * unit_regularised(d.s1, k.eps_norm) + x1c_dot);

  if (!ctrl.initialized) ctrl.x2c = d.x2d;
  const Eigen::Vector3d x2c_dot = (d.x2d - ctrl.x2c).cwiseQuotient(k.tau2);
  const Eigen::Vector3d x2(s.p, s.q, s.r);
  d.s2 = x2 - ctrl.x2c;
  d.x2_tilde = ctrl.x2c - d.x2d;

  const Eigen::Vector3d u_raw =
      t.G2.inverse() * (-t.f2 - k.K2.cwiseProduct(d.s2) -
                        k.k2 * unit_regularised(d.s2, k.eps_norm) + x2c_dot);
  const Eigen::Vector3d u = u_raw.cwiseMax(-k.max_deflection).cwiseMin(k.max_deflection);
  d.surface_saturated = u != u_raw;
  out.surfaces.aileron = u.x();
  out.surfaces.elevator = u.y();
  out.surfaces.rudder = u.z();

  ctrl.x1c += dt * x1c_dot;
  ctrl.x2c += dt * x2c_dot;
  ctrl.initialized = true;
  return out;
}

Eigen::Matrix2d virtual_linearisation(double alpha, double alpha_d, double mu,
                                      double mu_d) {
  const double eta_mu = mu_d + 0.5 * (mu - mu_d);
  const double eta_alpha = alpha_d + 0.5 * (alpha - alpha_d);
  Eigen::Matrix2d P;
  P << std::cos(eta_mu), -eta_alpha * std::sin(eta_mu),
       std::sin(eta_mu), eta_alpha * std::cos(eta_mu);
  return P;
}

namespace {

template <int N>
double min_eigenvalue(const Eigen::Matrix<double, N, N>& M) {
  const Eigen::Matrix<double, N, N> sym = 0.5 * (M + M.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, N, N>> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace

GainReport verify_bearing_gains(const BearingGains& k,
                                const std::vector<BearingGainSample>& samples) {
  if (samples.empty()) {
    throw Error(ErrorCode::Config, "samples", "gain verification needs samples");
  }
  double worst_k0 = INFINITY, worst_k1 = INFINITY;
  for (const auto& s : samples) {
    const Eigen::Matrix2d P = virtual_linearisation(s.alpha, s.alpha_d, s.mu, s.mu_d);
    const Eigen::Matrix2d GP = s.G0 * P;
    const Eigen::Matrix2d M0 = Eigen::Matrix2d(k.K0.asDiagonal()) -
                               GP * GP.transpose() / 2.0 -
                               (k.w2 / 2.0) * Eigen::Matrix2d::Identity();
    worst_k0 = std::min(worst_k0, min_eigenvalue<2>(M0));
    const Eigen::Matrix3d G1 = attitude_rate_matrix(s.alpha, s.beta);
    const Eigen::Matrix3d M1 = Eigen::Matrix3d(k.K1.asDiagonal()) -
                               G1.transpose() * G1 / 2.0 -
                               (1.0 + k.w2 / 2.0) * Eigen::Matrix3d::Identity();
    worst_k1 = std::min(worst_k1, min_eigenvalue<3>(M1));
  }
  GainReport rep;
  auto add = [&rep](std::string name, double margin, bool info, std::string note) {
    rep.conditions.push_back({std::move(name), margin, margin > 0.0, info, std::move(note)});
  };
  add("bearing.K0 - G0 P P^T G0^T/2 >= w2/2 I", worst_k0, false, "");
  add("bearing.K1 > G1^T G1/2 + (1 + w2/2) I", worst_k1, false, "");
  add("bearing.K2 > (1 + w2/2) I", k.K2.minCoeff() - (1.0 + k.w2 / 2.0), false, "");
  add("bearing.1/tau1 > 3/2 + w2", k.tau1.cwiseInverse().minCoeff() - (1.5 + k.w2), false, "");
  add("bearing.1/tau2 > 3/2 + w2", k.tau2.cwiseInverse().minCoeff() - (1.5 + k.w2), false, "");
  const char* note = "uses configured d_bar estimate";
  add("bearing.k0 > d_bar0", k.k0 - k.d_bar0, true, note);
  add("bearing.k1 > d_bar1", k.k1 - k.d_bar1, true, note);
  add("bearing.k2 > d_bar2", k.k2 - k.d_bar2, true, note);
  return rep;
}

}  // namespace igc
