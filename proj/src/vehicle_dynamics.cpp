#include "igc/vehicle_dynamics.hpp"

#include <cmath>
#include <string>

#include "igc/angles.hpp"
#include "igc/error.hpp"

namespace igc {

AircraftState::Vector AircraftState::to_vector() const {
  return {V, gamma, chi, mu, alpha, beta, p, q, r, omega, pos.x(), pos.y(), pos.z()};
}

AircraftState AircraftState::from_vector(const Vector& v) {
  AircraftState s;
  s.V = v[0];
  s.gamma = v[1];
  s.chi = v[2];
  s.mu = v[3];
  s.alpha = v[4];
  s.beta = v[5];
  s.p = v[6];
  s.q = v[7];
  s.r = v[8];
  s.omega = v[9];
  s.pos = Eigen::Vector3d(v[10], v[11], v[12]);
  return s;
}

namespace {

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw Error(ErrorCode::Config, std::string("vehicle.") + name,
                std::string("vehicle.") + name + " must be positive");
  }
}

}  // namespace

void VehicleParams::validate() const {
  require_positive(mass, "m_g");
  require_positive(gravity, "g");
  require_positive(rho, "rho");
  require_positive(S, "s");
  require_positive(b, "b");
  require_positive(c, "c");
  require_positive(Jx, "j_x");
  require_positive(Jy, "j_y");
  require_positive(Jz, "j_z");
  require_positive(prop_D, "prop_d");
  require_positive(Jp, "j_p");
  require_positive(R_motor, "r_motor");
  require_positive(KV, "k_v");
  require_positive(KQ, "k_q");
  require_positive(V_max, "v_max");
  require_positive(CT0, "c_t0");
  if (!(Jx * Jz - Jxz * Jxz > 0.0)) {
    throw Error(ErrorCode::Config, "vehicle.j_xz",
                "inertia tensor is not positive definite (Jx*Jz - Jxz^2 <= 0)");
  }
}

VehicleParams aerosonde_params() {
  VehicleParams p;
  p.mass = 11.0;
  p.gravity = 9.81;
  p.rho = 1.2682;
  p.S = 0.55;
  p.b = 2.89;
  p.c = 0.18;
  p.Jx = 0.8244;
  p.Jy = 1.135;
  p.Jz = 1.759;
  p.Jxz = 0.1204;

  p.CL0 = 0.28;
  p.CLalpha = 3.45;
  p.CLq = 7.95;
  p.CLde = 0.13;
  p.CD0 = 0.03;
  p.CDalpha = 0.30;
  p.CDq = 0.0;
  p.CDde = 0.0135;
  p.CY0 = 0.0;
  p.CYbeta = -0.98;
  p.CYp = 0.0;
  p.CYr = 0.0;
  p.CYda = 0.075;
  p.CYdr = 0.19;

  p.Cl0 = 0.0;
  p.Clbeta = -0.13;
  p.Clp = -0.51;
  p.Clr = 0.25;
  p.Clda = 0.17;
  p.Cldr = 0.0024;
  p.Cm0 = 0.0135;
  p.Cmalpha = -2.74;
  p.Cmq = -38.21;
  p.Cmde = -0.99;
  p.Cn0 = 0.0;
  p.Cnbeta = 0.073;
  p.Cnp = -0.069;
  p.Cnr = -0.095;
  p.Cnda = -0.011;
  p.Cndr = -0.069;

  p.prop_D = 0.508;
  p.CT0 = 0.09357;
  p.CT1 = -0.06044;
  p.CT2 = -0.1079;
  p.CQ0 = 0.00523;
  p.CQ1 = 0.00497;
  p.CQ2 = -0.01664;

  p.KV = 0.0659;
  p.KQ = 0.0659;
  p.R_motor = 0.042;
  p.V_max = 44.4;
  p.i0 = 0.063;  // R * 1.5 A: no-load current as an equivalent voltage drop
  p.Jp = 0.002;
  return p;
}

GammaSet inertia_gammas(const VehicleParams& params) {
  const double Jx = params.Jx, Jy = params.Jy, Jz = params.Jz, Jxz = params.Jxz;
  GammaSet out;
  out.det = Jx * Jz - Jxz * Jxz;
  if (!(out.det > 0.0) || !(Jy > 0.0)) {
    throw Error(ErrorCode::Config, "vehicle.j_xz",
                "inertia tensor is not positive definite");
  }
  const double G = out.det;
  out.g[0] = Jxz * (Jx - Jy + Jz) / G;
  out.g[1] = (Jz * (Jz - Jy) + Jxz * Jxz) / G;
  out.g[2] = Jz / G;
  out.g[3] = Jxz / G;
  out.g[4] = (Jz - Jx) / Jy;
  out.g[5] = Jxz / Jy;
  out.g[6] = ((Jx - Jy) * Jx + Jxz * Jxz) / G;
  out.g[7] = Jx / G;
  return out;
}

double dynamic_pressure(double V, const VehicleParams& params) {
  return 0.5 * params.rho * V * V * params.S;
}

namespace {

// Non-dimensional rate factors: c/(2V) for pitch, b/(2V) for roll and yaw.
struct RateScale {
  double chord = 0.0;
  double span = 0.0;
};

RateScale rate_scale(double V, const VehicleParams& params) {
  if (std::abs(V) < kRateTermMinSpeed) return {};
  return {params.c / (2.0 * V), params.b / (2.0 * V)};
}

}  // namespace

AeroForces aero_forces(const AircraftState& s, const ActuatorCommand& cmd,
                       const VehicleParams& pr) {
  const double Q = dynamic_pressure(s.V, pr);
  const RateScale k = rate_scale(s.V, pr);
  AeroForces f;
  f.lift = Q * (pr.CL0 + pr.CLalpha * s.alpha + pr.CLq * k.chord * s.q +
                pr.CLde * cmd.elevator);
  f.drag = Q * (pr.CD0 + pr.CDalpha * s.alpha + pr.CDq * k.chord * s.q +
                pr.CDde * cmd.elevator);
  f.side = Q * (pr.CY0 + pr.CYbeta * s.beta + pr.CYp * k.span * s.p +
                pr.CYr * k.span * s.r + pr.CYda * cmd.aileron +
                pr.CYdr * cmd.rudder);
  return f;
}

AeroMoments aero_moments(const AircraftState& s, const ActuatorCommand& cmd,
                         const VehicleParams& pr) {
  const double Q = dynamic_pressure(s.V, pr);
  const RateScale k = rate_scale(s.V, pr);
  AeroMoments m;
  m.roll = Q * pr.b *
           (pr.Cl0 + pr.Clbeta * s.beta + pr.Clp * k.span * s.p +
            pr.Clr * k.span * s.r + pr.Clda * cmd.aileron + pr.Cldr * cmd.rudder);
  m.pitch = Q * pr.c *
            (pr.Cm0 + pr.Cmalpha * s.alpha + pr.Cmq * k.chord * s.q +
             pr.Cmde * cmd.elevator);
  m.yaw = Q * pr.b *
          (pr.Cn0 + pr.Cnbeta * s.beta + pr.Cnp * k.span * s.p +
           pr.Cnr * k.span * s.r + pr.Cnda * cmd.aileron + pr.Cndr * cmd.rudder);
  return m;
}

ThrustQuadratic thrust_quadratic(double V, const VehicleParams& pr) {
  const double D = pr.prop_D;
  return {pr.rho * std::pow(D, 4) * pr.CT0 / (4.0 * kPi * kPi),
          pr.rho * std::pow(D, 3) * pr.CT1 * V / (2.0 * kPi),
          pr.rho * D * D * pr.CT2 * V * V};
}

PropellerOutput propeller(double V, double omega, const VehicleParams& pr) {
  const double D = pr.prop_D;
  const ThrustQuadratic t = thrust_quadratic(V, pr);
  PropellerOutput out;
  out.thrust = t.A * omega * omega + t.B * omega + t.C;
  out.torque = pr.rho * std::pow(D, 5) * pr.CQ0 / (4.0 * kPi * kPi) * omega * omega +
               pr.rho * std::pow(D, 4) * pr.CQ1 * V / (2.0 * kPi) * omega +
               pr.rho * std::pow(D, 3) * pr.CQ2 * V * V;
  return out;
}

ForceMoment force_moment(const AircraftState& state, const ActuatorCommand& cmd,
                         const VehicleParams& params) {
  return {aero_forces(state, cmd, params), aero_moments(state, cmd, params),
          propeller(state.V, state.omega, params)};
}

double motor_derivative(double omega, double throttle, double V,
                        const VehicleParams& pr) {
  const double Qp = propeller(V, omega, pr).torque;
  return pr.KQ * ((pr.V_max * throttle - pr.KV * omega) - pr.i0) /
             (pr.R_motor * pr.Jp) -
         Qp / pr.Jp;
}

double invert_thrust(double thrust, double V, const VehicleParams& params) {
  const ThrustQuadratic t = thrust_quadratic(V, params);
  const double disc = t.B * t.B - 4.0 * t.A * (t.C - thrust);
  if (disc < 0.0) {
    throw Error(ErrorCode::InfeasibleThrust, "thrust_discriminant",
                "thrust " + std::to_string(thrust) +
                    " N is below the minimum of the thrust curve at V = " +
                    std::to_string(V) + " m/s");
  }
  const double root = std::sqrt(disc);
  // Rationalised form avoids cancellation when B > 0.
  if (t.B > 0.0) return 2.0 * (thrust - t.C) / (root + t.B);
  return (-t.B + root) / (2.0 * t.A);
}

RollAux roll_aux_terms(const AircraftState& s, C2Form form) {
  const double sa = std::sin(s.alpha), ca = std::cos(s.alpha);
  const double sb = std::sin(s.beta), tb = std::tan(s.beta), cb = std::cos(s.beta);
  const double sm = std::sin(s.mu), cm = std::cos(s.mu);
  const double tg = std::tan(s.gamma);
  RollAux aux;
  aux.C1 = sa * tb + tg * (sa * sm - ca * sb * cm);
  // Printed form repeats C1 verbatim. The re-derived one is the cos(alpha)
  // counterpart: ca*tb + tg*(ca*sm + sa*sb*cm).
  aux.C2 = form == C2Form::Printed ? aux.C1 : ca * tb + tg * (ca * sm + sa * sb * cm);
  aux.C3 = cb * cm * tg;
  return aux;
}

void check_divisor_guards(const AircraftState& s) {
  if (!(s.V > kDivisorGuard)) {
    throw Error(ErrorCode::SingularState, "V_f",
                "airspeed " + std::to_string(s.V) + " m/s below divisor guard");
  }
  if (!(std::abs(std::cos(s.beta)) > kDivisorGuard)) {
    throw Error(ErrorCode::SingularState, "cos_beta_f",
                "|cos(beta_f)| below divisor guard");
  }
  if (!(std::abs(std::cos(s.gamma)) > kDivisorGuard)) {
    throw Error(ErrorCode::SingularState, "cos_gamma_f",
                "|cos(gamma_f)| below divisor guard");
  }
}

Eigen::Vector3d body_rate_derivative(const AircraftState& s,
                                     const AeroMoments& m, double prop_torque,
                                     const VehicleParams& params,
                                     const GammaSet& G) {
  const double p = s.p, q = s.q, r = s.r;
  const double l = m.roll - prop_torque;
  return {G(1) * p * q - G(2) * q * r + G(3) * l + G(4) * m.yaw,
          G(5) * p * r - G(6) * (p * p - r * r) + m.pitch / params.Jy,
          G(7) * p * q - G(1) * q * r + G(4) * l + G(8) * m.yaw};
}

StateDerivative state_derivative(const AircraftState& s,
                                 const ActuatorCommand& cmd,
                                 const VehicleParams& pr, const GammaSet& gammas,
                                 const Disturbance* disturbance) {
  check_divisor_guards(s);

  const ForceMoment fm = force_moment(s, cmd, pr);
  const double L = fm.forces.lift, D = fm.forces.drag, Y = fm.forces.side;
  const double T = fm.prop.thrust;
  const double m = pr.mass, g = pr.gravity, V = s.V;

  const double sa = std::sin(s.alpha), ca = std::cos(s.alpha);
  const double sb = std::sin(s.beta), cb = std::cos(s.beta), tb = std::tan(s.beta);
  const double sg = std::sin(s.gamma), cg = std::cos(s.gamma);
  const double sm = std::sin(s.mu), cm = std::cos(s.mu);
  const double sc = std::sin(s.chi), cc = std::cos(s.chi);
  const double mV = m * V;

  StateDerivative d;
  d.pos = Eigen::Vector3d(V * cg * cc, V * cg * sc, -V * sg);
  d.V = (Y * sb - D * cb + T * ca * cb) / m - g * sg;
  d.gamma = -g * cg / V + T * (cm * sa + ca * sb * sm) / mV - Y * cb * sm / mV +
            L * cm / mV - D * sb * sm / mV;
  d.chi = (T * (sa * sm - ca * cm * sb) + Y * cb * cm + L * sm + D * cm * sb) /
          (mV * cg);

  // Body-x force includes thrust; body-z is lift/drag only.
  const RollAux aux = roll_aux_terms(s, pr.c2_form);
  const double F_bx = T - D * ca + L * sa;
  const double F_bz = L * ca + D * sa;
  d.mu = s.p * ca / cb + s.r * sa / cb - g * cm * cg * tb / V + Y * aux.C3 / mV +
         F_bx * aux.C1 / mV + F_bz * aux.C2 / mV;

  d.alpha = -(L + T * sa - m * g * cg * cm) / (mV * cb) - s.p * ca * tb + s.q -
            s.r * sa * tb;
  d.beta = (Y * cb + D * sb - T * ca * sb) / mV + g * cg * sm / V - s.r * ca +
           s.p * sa;

  const Eigen::Vector3d rates =
      body_rate_derivative(s, fm.moments, fm.prop.torque, pr, gammas);
  d.p = rates.x();
  d.q = rates.y();
  d.r = rates.z();
  d.omega = motor_derivative(s.omega, cmd.throttle, V, pr);

  if (disturbance != nullptr) {
    auto v = d.to_vector();
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += (*disturbance)[i];
    d = StateDerivative::from_vector(v);
  }
  return d;
}

}  // namespace igc
