#include <cmath>
#include <random>

#include <doctest.h>

#include "igc/angles.hpp"
#include "igc/error.hpp"
#include "igc/vehicle_dynamics.hpp"
#include "test_support.hpp"

using namespace igc;

TEST_CASE("inertia gammas: isotropic inertia") {
  VehicleParams p = aerosonde_params();
  p.Jx = p.Jy = p.Jz = 1.0;
  p.Jxz = 0.0;
  const GammaSet g = inertia_gammas(p);
  for (int i : {1, 2, 4, 5, 6, 7}) CHECK(g(i) == 0.0);
  CHECK(g(3) == 1.0);
  CHECK(g(8) == 1.0);
}

TEST_CASE("inertia gammas: symmetric airframe zeroes the coupling terms") {
  VehicleParams p = aerosonde_params();
  p.Jxz = 0.0;
  const GammaSet g = inertia_gammas(p);
  CHECK(g(1) == 0.0);
  CHECK(g(4) == 0.0);
  CHECK(g(6) == 0.0);
}

TEST_CASE("inertia gammas: Aerosonde values") {
  const GammaSet g = inertia_gammas(aerosonde_params());
  CHECK_NEAR(g.det, 1.4356234400000001, 1e-14);
  const double expected[8] = {0.12147151902172897, 0.77465450132243563, 1.2252516579138606,
                              0.083866003190920302, 0.82343612334801752, 0.10607929515418502,
                              -0.16826312058543708, 0.57424529095178323};
  for (int i = 1; i <= 8; ++i) CHECK_NEAR(g(i), expected[i - 1], 1e-14);
  // Gamma3 Gamma8 - Gamma4^2 = 1/det
  CHECK_NEAR(g(3) * g(8) - g(4) * g(4), 1.0 / g.det, 1e-12);
}

TEST_CASE("inertia gammas: indefinite inertia is a config error") {
  VehicleParams p = aerosonde_params();
  p.Jxz = 2.0;
  CHECK_THROWS_AS(inertia_gammas(p), Error);
}

TEST_CASE("aero forces") {
  const VehicleParams pr = aerosonde_params();
  AircraftState s;
  ActuatorCommand u;

  SUBCASE("zero airspeed gives zero forces and moments") {
    s.alpha = 0.1;
    s.p = s.q = s.r = 0.5;
    u.elevator = 0.2;
    const AeroForces f = aero_forces(s, u, pr);
    const AeroMoments m = aero_moments(s, u, pr);
    CHECK(f.lift == 0.0);
    CHECK(f.drag == 0.0);
    CHECK(f.side == 0.0);
    CHECK(m.roll == 0.0);
    CHECK(m.pitch == 0.0);
    CHECK(m.yaw == 0.0);
  }
  SUBCASE("linear in air density") {
    s = test::oracle_state();
    u = test::oracle_command();
    VehicleParams dense = pr;
    dense.rho *= 2.0;
    const AeroForces a = aero_forces(s, u, pr), b = aero_forces(s, u, dense);
    CHECK_NEAR(b.lift, 2.0 * a.lift, 1e-15);
    CHECK_NEAR(b.drag, 2.0 * a.drag, 1e-15);
    CHECK_NEAR(b.side, 2.0 * a.side, 1e-15);
  }
  SUBCASE("lift at V = 25, alpha = 0.05") {
    s.V = 25.0;
    s.alpha = 0.05;
    CHECK_NEAR(aero_forces(s, u, pr).lift, 98.632273437500004, 1e-14);
  }
  SUBCASE("off-trim state") {
    const AeroForces f = aero_forces(test::oracle_state(), test::oracle_command(), pr);
    CHECK_NEAR(f.lift, 88.475936697774998, 1e-13);
    CHECK_NEAR(f.drag, 8.731055268375, 1e-13);
    CHECK_NEAR(f.side, -2.9887605989999999, 1e-13);
  }
}

TEST_CASE("aero moments") {
  const VehicleParams pr = aerosonde_params();
  SUBCASE("only bias terms survive at zero state") {
    AircraftState s;
    s.V = 20.0;
    const AeroMoments m = aero_moments(s, {}, pr);
    const double Q = dynamic_pressure(20.0, pr);
    CHECK_NEAR(m.roll, Q * pr.b * pr.Cl0, 1e-15);
    CHECK_NEAR(m.pitch, Q * pr.c * pr.Cm0, 1e-15);
    CHECK_NEAR(m.yaw, Q * pr.b * pr.Cn0, 1e-15);
  }
  SUBCASE("off-trim state") {
    const AeroMoments m = aero_moments(test::oracle_state(), test::oracle_command(), pr);
    CHECK_NEAR(m.roll, -0.079872701880674815, 1e-12);
    CHECK_NEAR(m.pitch, -3.2183797122080997, 1e-13);
    CHECK_NEAR(m.yaw, 0.050391317867687441, 1e-12);
  }
}

TEST_CASE("propeller") {
  const VehicleParams pr = aerosonde_params();
  const PropellerOutput zero = propeller(0.0, 0.0, pr);
  CHECK(zero.thrust == 0.0);
  CHECK(zero.torque == 0.0);

  const PropellerOutput out = propeller(25.0, 500.0, pr);
  CHECK_NEAR(out.thrust, 7.9831831232123633, 1e-13);
  CHECK_NEAR(out.torque, 0.52699441326199414, 1e-13);

  // Quadratic in rotor speed: constant second difference.
  const double h = 37.0;
  auto T = [&](double w) { return propeller(25.0, w, pr).thrust; };
  const double d2a = T(300.0 + h) - 2.0 * T(300.0) + T(300.0 - h);
  const double d2b = T(700.0 + h) - 2.0 * T(700.0) + T(700.0 - h);
  CHECK_NEAR(d2a, d2b, 1e-10);
}

TEST_CASE("motor") {
  const VehicleParams pr = aerosonde_params();
  SUBCASE("at rest with zero throttle only the no-load term remains") {
    CHECK_NEAR(motor_derivative(0.0, 0.0, 0.0, pr),
               -pr.KQ * pr.i0 / (pr.R_motor * pr.Jp), 1e-15);
    CHECK_NEAR(motor_derivative(0.0, 0.0, 0.0, pr), -49.424999999999997, 1e-14);
  }
  SUBCASE("equilibrium found by root bracketing") {
    CHECK(std::abs(motor_derivative(340.7534201814027, 0.5, 25.0, pr)) < 1e-8);
  }
  SUBCASE("affine and increasing in throttle") {
    const double a = motor_derivative(400.0, 0.2, 20.0, pr);
    const double b = motor_derivative(400.0, 0.7, 20.0, pr);
    CHECK(b > a);
    CHECK_NEAR((b - a) / 0.5, pr.KQ * pr.V_max / (pr.R_motor * pr.Jp), 1e-12);
  }
}

TEST_CASE("thrust inversion") {
  const VehicleParams pr = aerosonde_params();
  SUBCASE("bracketing oracle at V = 25, T = 10 N") {
    CHECK_NEAR(invert_thrust(10.0, 25.0, pr), 512.39750384030026, 1e-12);
  }
  SUBCASE("static thrust is a pure square root") {
    const ThrustQuadratic q = thrust_quadratic(0.0, pr);
    CHECK(q.B == 0.0);
    CHECK(q.C == 0.0);
    CHECK_NEAR(invert_thrust(20.0, 0.0, pr), std::sqrt(20.0 / q.A), 1e-14);
  }
  SUBCASE("round trip over the flight envelope") {
    for (double V = 0.0; V <= 40.0; V += 5.0) {
      const ThrustQuadratic q = thrust_quadratic(V, pr);
      for (double w = 50.0; w <= 1000.0; w += 50.0) {
        if (w < -q.B / (2.0 * q.A)) continue;
        CHECK(std::abs(invert_thrust(propeller(V, w, pr).thrust, V, pr) - w) / w < 1e-9);
      }
    }
  }
  SUBCASE("thrust below the curve minimum is infeasible") {
    try {
      invert_thrust(-1e3, 25.0, pr);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::InfeasibleThrust);
    }
  }
}

TEST_CASE("state derivative") {
  const VehicleParams pr = aerosonde_params();
  const GammaSet g = inertia_gammas(pr);

  SUBCASE("position follows the flight path") {
    AircraftState s;
    s.V = 25.0;
    s.alpha = 0.05;
    const StateDerivative d = state_derivative(s, {}, pr, g);
    CHECK(d.pos.x() == doctest::Approx(25.0).epsilon(1e-15));
    CHECK(d.pos.y() == 0.0);
    CHECK(d.pos.z() == 0.0);
  }
  SUBCASE("wings-level glide") {
    AircraftState s;
    s.V = 22.0;
    s.gamma = -0.05;
    s.alpha = 0.04;
    const StateDerivative d = state_derivative(s, {}, pr, g);
    const double L = aero_forces(s, {}, pr).lift;
    const double T = propeller(s.V, 0.0, pr).thrust;
    CHECK_NEAR(d.gamma,
               (-pr.gravity * std::cos(s.gamma) + (L + T * std::sin(s.alpha)) / pr.mass) / s.V,
               1e-14);
  }
  SUBCASE("off-trim state, term by term") {
    const StateDerivative d =
        state_derivative(test::oracle_state(), test::oracle_command(), pr, g);
    CHECK_NEAR(d.V, -0.89063563739869789, 1e-13);
    CHECK_NEAR(d.gamma, -0.084572729469835295, 1e-13);
    CHECK_NEAR(d.chi, 0.093134544308506734, 1e-13);
    CHECK_NEAR(d.mu, 0.060548652520125618, 1e-13);
    CHECK_NEAR(d.alpha, 0.022374148202253467, 1e-13);
    CHECK_NEAR(d.beta, 0.076593454255423674, 1e-13);
    CHECK_NEAR(d.p, -0.80799269519849592, 1e-13);
    CHECK_NEAR(d.q, -2.8340254380688101, 1e-13);
    CHECK_NEAR(d.r, -0.026310757608988898, 1e-12);
    CHECK_NEAR(d.omega, -4257.5862875552812, 1e-13);
  }
  SUBCASE("printed roll term differs from the re-derived one") {
    VehicleParams printed = pr;
    printed.c2_form = C2Form::Printed;
    const AircraftState s = test::oracle_state();
    const RollAux a = roll_aux_terms(s, C2Form::Rederived);
    const RollAux b = roll_aux_terms(s, C2Form::Printed);
    CHECK(b.C2 == b.C1);
    CHECK(a.C2 != a.C1);
    CHECK(state_derivative(s, {}, printed, g).mu != state_derivative(s, {}, pr, g).mu);
  }
  SUBCASE("divisor guards name the offending divisor") {
    AircraftState s = test::oracle_state();
    s.beta = kPi / 2.0;
    try {
      state_derivative(s, {}, pr, g);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::SingularState);
      CHECK(e.guard() == "cos_beta_f");
    }
    s = test::oracle_state();
    s.V = 0.0;
    CHECK_THROWS_WITH_AS(state_derivative(s, {}, pr, g), doctest::Contains("airspeed"), Error);
  }
  SUBCASE("finite over random valid states") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 500; ++i) {
      AircraftState s;
      s.V = 15.0 + 10.0 * std::abs(u(rng));
      s.gamma = 1.2 * u(rng);
      s.chi = kPi * u(rng);
      s.mu = 1.2 * u(rng);
      s.alpha = 0.3 * u(rng);
      s.beta = 0.3 * u(rng);
      s.p = u(rng);
      s.q = u(rng);
      s.r = u(rng);
      s.omega = 600.0 * std::abs(u(rng));
      const ActuatorCommand c{std::abs(u(rng)), 0.3 * u(rng), 0.3 * u(rng), 0.3 * u(rng)};
      for (double v : state_derivative(s, c, pr, g).to_vector()) CHECK(std::isfinite(v));
    }
  }
}

TEST_CASE("state derivative matches differences of an integrated trajectory") {
  // Smooth inputs, dt = 1e-4: central differences of the RK4 trajectory agree
  // with the derivative to O(dt^2); the rotor channel has x''' of a few hundred.
  const VehicleParams pr = aerosonde_params();
  const GammaSet g = inertia_gammas(pr);
  const ActuatorCommand c = test::oracle_command();
  auto f = [&](const AircraftState::Vector& x) {
    return state_derivative(AircraftState::from_vector(x), c, pr, g).to_vector();
  };
  auto rk4 = [&](AircraftState::Vector x, double h) {
    auto axpy = [](AircraftState::Vector a, double s, const AircraftState::Vector& b) {
      for (std::size_t i = 0; i < a.size(); ++i) a[i] += s * b[i];
      return a;
    };
    const auto k1 = f(x), k2 = f(axpy(x, h / 2, k1)), k3 = f(axpy(x, h / 2, k2)),
               k4 = f(axpy(x, h, k3));
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    return x;
  };
  const double h = 1e-4;
  const auto x0 = test::oracle_state().to_vector();
  const auto xp = rk4(x0, h), xm = rk4(x0, -h);
  const auto d = f(x0);
  for (std::size_t i = 0; i < x0.size(); ++i) {
    const double fd = (xp[i] - xm[i]) / (2 * h);
    CHECK(std::abs(fd - d[i]) <= 1e-5 * std::max(std::abs(d[i]), 1.0));
  }
}

TEST_CASE("parameter validation") {
  VehicleParams p = aerosonde_params();
  CHECK_NOTHROW(p.validate());
  p.mass = 0.0;
  CHECK_THROWS_AS(p.validate(), Error);
}
