#pragma once

// Follower plant: wind-axis 6-DOF equations of motion of a fixed-wing UAV with
// a linear aerodynamic model and a propeller driven by a first-order DC motor.
// Everything here is a pure function of its arguments.

#include <array>
#include <cstddef>

#include <Eigen/Core>

namespace igc {

/// Follower state. Positions are North-East-Down, so altitude is -z.
struct AircraftState {
  double V = 0.0;      // airspeed [m/s]
  double gamma = 0.0;  // flight path angle [rad]
  double chi = 0.0;    // heading [rad]
  double mu = 0.0;     // velocity roll angle [rad]
  double alpha = 0.0;  // angle of attack [rad]
  double beta = 0.0;   // sideslip [rad]
  double p = 0.0, q = 0.0, r = 0.0;  // body rates [rad/s]
  double omega = 0.0;                // rotor speed [rad/s]
  Eigen::Vector3d pos = Eigen::Vector3d::Zero();

  static constexpr std::size_t kSize = 13;
  using Vector = std::array<double, kSize>;

  Vector to_vector() const;
  static AircraftState from_vector(const Vector& v);
};

/// Time derivative of every AircraftState field, same layout.
using StateDerivative = AircraftState;

struct ActuatorCommand {
  double throttle = 0.0;  // [0, 1]
  double aileron = 0.0;   // [rad]
  double elevator = 0.0;  // [rad]
  double rudder = 0.0;    // [rad]
};

/// Which expression to use for the second auxiliary term of the velocity-roll
/// equation. The printed form duplicates the first term; the re-derived form
/// is the one consistent with the translational equations.
enum class C2Form { Rederived, Printed };

struct VehicleParams {
  double mass = 0.0;     // m_g [kg]
  double gravity = 0.0;  // [m/s^2]
  double rho = 0.0;      // [kg/m^3]
  double S = 0.0;        // wing area [m^2]
  double b = 0.0;        // span [m]
  double c = 0.0;        // chord [m]
  double Jx = 0.0, Jy = 0.0, Jz = 0.0, Jxz = 0.0;  // [kg m^2]

  // Lift, drag and side force coefficients.
  double CL0 = 0.0, CLalpha = 0.0, CLq = 0.0, CLde = 0.0;
  double CD0 = 0.0, CDalpha = 0.0, CDq = 0.0, CDde = 0.0;
  double CY0 = 0.0, CYbeta = 0.0, CYp = 0.0, CYr = 0.0, CYda = 0.0, CYdr = 0.0;
  // Roll, pitch and yaw moment coefficients.
  double Cl0 = 0.0, Clbeta = 0.0, Clp = 0.0, Clr = 0.0, Clda = 0.0, Cldr = 0.0;
  double Cm0 = 0.0, Cmalpha = 0.0, Cmq = 0.0, Cmde = 0.0;
  double Cn0 = 0.0, Cnbeta = 0.0, Cnp = 0.0, Cnr = 0.0, Cnda = 0.0, Cndr = 0.0;

  // Propeller.
  double prop_D = 0.0;
  double CT0 = 0.0, CT1 = 0.0, CT2 = 0.0;
  double CQ0 = 0.0, CQ1 = 0.0, CQ2 = 0.0;

  // Motor.
  double KV = 0.0;       // [V s/rad]
  double KQ = 0.0;       // [N m/A]
  double R_motor = 0.0;  // [ohm]
  double V_max = 0.0;    // [V]
  double i0 = 0.0;       // [A]
  double Jp = 0.0;       // rotor + motor inertia [kg m^2]

  C2Form c2_form = C2Form::Rederived;

  /// Throws Error(Config) on a non-physical parameter set.
  void validate() const;

  friend bool operator==(const VehicleParams&, const VehicleParams&) = default;
};

/// Aerosonde parameter set used throughout the reference scenarios.
VehicleParams aerosonde_params();

/// Inertia-derived constants of the body-rate equations.
struct GammaSet {
  double det = 0.0;  // Jx Jz - Jxz^2
  std::array<double, 8> g{};  // g[0] is Gamma_1, ..., g[7] is Gamma_8

  double operator()(int i) const { return g[static_cast<std::size_t>(i - 1)]; }
};

GammaSet inertia_gammas(const VehicleParams& params);

struct AeroForces {
  double lift = 0.0, drag = 0.0, side = 0.0;  // [N]
};

struct AeroMoments {
  double roll = 0.0, pitch = 0.0, yaw = 0.0;  // [N m]
};

struct PropellerOutput {
  double thrust = 0.0;  // [N]
  double torque = 0.0;  // [N m]
};

struct ForceMoment {
  AeroForces forces;
  AeroMoments moments;
  PropellerOutput prop;
};

/// Below this airspeed the V-normalised rate terms of the aero model are zeroed.
inline constexpr double kRateTermMinSpeed = 0.1;
/// Minimum |cos| / speed accepted by the equations of motion.
inline constexpr double kDivisorGuard = 1e-3;

/// Dynamic pressure times wing area, 0.5 rho V^2 S [N].
double dynamic_pressure(double V, const VehicleParams& params);

AeroForces aero_forces(const AircraftState& state, const ActuatorCommand& cmd,
                       const VehicleParams& params);
AeroMoments aero_moments(const AircraftState& state, const ActuatorCommand& cmd,
                         const VehicleParams& params);
PropellerOutput propeller(double V, double omega, const VehicleParams& params);
ForceMoment force_moment(const AircraftState& state, const ActuatorCommand& cmd,
                         const VehicleParams& params);

/// Rotor acceleration [rad/s^2].
double motor_derivative(double omega, double throttle, double V,
                        const VehicleParams& params);

/// Coefficients of thrust as a quadratic in rotor speed: T = A w^2 + B w + C.
struct ThrustQuadratic {
  double A = 0.0, B = 0.0, C = 0.0;
};
ThrustQuadratic thrust_quadratic(double V, const VehicleParams& params);

/// Rotor speed producing `thrust` on the upper branch of the thrust curve.
/// Throws Error(InfeasibleThrust) when the thrust is below the curve minimum.
double invert_thrust(double thrust, double V, const VehicleParams& params);

/// Auxiliary terms of the velocity-roll equation.
struct RollAux {
  double C1 = 0.0, C2 = 0.0, C3 = 0.0;
};
RollAux roll_aux_terms(const AircraftState& state, C2Form form);

/// Additive disturbance per derivative channel (all zero by default).
using Disturbance = AircraftState::Vector;

/// Full state derivative. Throws Error(SingularState) naming the divisor when
/// V, cos(beta) or cos(gamma) falls below kDivisorGuard.
StateDerivative state_derivative(const AircraftState& state,
                                 const ActuatorCommand& cmd,
                                 const VehicleParams& params,
                                 const GammaSet& gammas,
                                 const Disturbance* disturbance = nullptr);

/// Body-rate accelerations [p_dot, q_dot, r_dot] for given moments and
/// propeller torque.
Eigen::Vector3d body_rate_derivative(const AircraftState& state,
                                     const AeroMoments& moments,
                                     double prop_torque,
                                     const VehicleParams& params,
                                     const GammaSet& gammas);

/// Throws if any divisor guard of the equations of motion is violated.
void check_divisor_guards(const AircraftState& state);

}  // namespace igc
