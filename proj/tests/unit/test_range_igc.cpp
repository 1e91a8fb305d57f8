#include <cmath>

#include <doctest.h>

#include "igc/angles.hpp"
#include "igc/error.hpp"
#include "igc/range_igc.hpp"
#include "test_support.hpp"

using namespace igc;

namespace {

// Loiter scenario geometry at t = 0 with an explicit follower state.
struct LoiterStart {
  AgentKinematics leader{Eigen::Vector3d(100, 100, -1000), 25.0, deg2rad(10.0), 0.0};
  AircraftState follower;
  LoiterStart() {
    follower.V = 25.0;
    follower.alpha = 0.07;
    follower.omega = 500.0;
    follower.pos = {0.0, 0.0, -1050.0};
  }
};

}  // namespace

TEST_CASE("range terms") {
  const VehicleParams pr = aerosonde_params();

  SUBCASE("loiter start, term by term") {
    const LoiterStart s;
    const AgentKinematics f{s.follower.pos, s.follower.V, s.follower.gamma, s.follower.chi};
    const RelativeState rel = relative_state(s.leader, f);
    const RangeTerms t = range_terms(s.leader, s.follower, rel, force_moment(s.follower, {}, pr), pr);
    CHECK_NEAR(t.f0, 14.966394402979047, 1e-14);
    CHECK_NEAR(t.g0, -0.66666666666666674, 1e-14);
    CHECK_NEAR(t.f1, -1.0105968750000001, 1e-14);
    CHECK_NEAR(t.g1, 0.090686454568479957, 1e-14);
    CHECK_NEAR(t.f2, -26162.981730440522, 1e-13);
    CHECK_NEAR(t.g2, 34832.857142857138, 1e-14);
  }
  SUBCASE("follower flying along the line of sight") {
    AircraftState fol;
    fol.V = 25.0;
    const AgentKinematics leader{Eigen::Vector3d(50, 0, 0), 25.0, 0.0, 0.0};
    const AgentKinematics f{fol.pos, fol.V, 0.0, 0.0};
    const RangeTerms t = range_terms(leader, fol, relative_state(leader, f), force_moment(fol, {}, pr), pr);
    CHECK(t.g0 == -1.0);
    CHECK(t.g1 == doctest::Approx(1.0 / pr.mass).epsilon(1e-15));
  }
  SUBCASE("velocity orthogonal to the line of sight") {
    AircraftState fol;
    fol.V = 25.0;
    fol.chi = kPi / 2;
    const AgentKinematics leader{Eigen::Vector3d(50, 0, 0), 25.0, 0.0, 0.0};
    const AgentKinematics f{fol.pos, fol.V, 0.0, fol.chi};
    try {
      range_terms(leader, fol, relative_state(leader, f), force_moment(fol, {}, pr), pr);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::LossOfControllability);
      CHECK(e.guard() == "g0_range");
    }
  }
}

TEST_CASE("mean-value slope") {
  const VehicleParams pr = aerosonde_params();
  const ThrustQuadratic q = thrust_quadratic(25.0, pr);
  CHECK_NEAR(mean_value_slope(420.0, 420.0, 25.0, pr), 2.0 * q.A * 420.0 + q.B, 1e-15);
  CHECK_NEAR(mean_value_slope(600.0, 500.0, 25.0, pr), 0.18021548964186263, 1e-14);
  const double lhs = propeller(25.0, 600.0, pr).thrust - propeller(25.0, 500.0, pr).thrust;
  CHECK_NEAR(lhs, mean_value_slope(600.0, 500.0, 25.0, pr) * 100.0, 1e-12);
}

TEST_CASE("smoothed sign") {
  CHECK(smooth_sign(0.0, 0.05) == 0.0);
  CHECK(smooth_sign(0.025, 0.05) == 0.5);
  CHECK(smooth_sign(3.0, 0.05) == 1.0);
  CHECK(smooth_sign(-3.0, 0.05) == -1.0);
}

TEST_CASE("range control step") {
  const VehicleParams pr = aerosonde_params();
  const RangeGains k;

  // Terms chosen so that desired speed is 25 m/s, desired thrust is the
  // thrust at 500 rad/s and the rotor sits exactly on it.
  const double T500 = propeller(25.0, 500.0, pr).thrust;
  RangeTerms t;
  t.g0 = -1.0;
  t.f0 = 25.0;
  t.g1 = 1.0 / pr.mass;
  t.f1 = -t.g1 * T500;
  t.g2 = pr.KQ * pr.V_max / (pr.R_motor * pr.Jp);
  t.f2 = motor_derivative(500.0, 0.0, 25.0, pr);

  SUBCASE("all errors zero gives the rotor trim throttle") {
    RangeCtrlState c;
    const RangeStepResult r = range_control_step(c, t, {0.0, 25.0, 500.0}, 0.005, k, pr);
    CHECK_NEAR(r.diag.x1d, 25.0, 1e-15);
    CHECK(r.diag.s1 == 0.0);
    CHECK_NEAR(r.diag.x2d, 500.0, 1e-10);
    CHECK(std::abs(r.diag.s2) < 1e-10);
    CHECK_NEAR(r.throttle, -t.f2 / t.g2, 1e-10);
    CHECK(std::abs(motor_derivative(500.0, r.throttle, 25.0, pr)) < 1e-5);
  }
  SUBCASE("deterministic") {
    RangeCtrlState a, b;
    const RangeMeasurement m{3.0, 24.0, 480.0};
    for (int i = 0; i < 3; ++i) {
      const RangeStepResult ra = range_control_step(a, t, m, 0.005, k, pr);
      const RangeStepResult rb = range_control_step(b, t, m, 0.005, k, pr);
      CHECK(ra.throttle == rb.throttle);
    }
  }
  SUBCASE("throttle always within [0, 1], saturation flagged") {
    RangeCtrlState c;
    RangeGains stiff = k;
    stiff.K2 = 1e3;
    const RangeStepResult r = range_control_step(c, t, {0.0, 25.0, 50.0}, 0.005, stiff, pr);
    CHECK(r.throttle == 1.0);
    CHECK(r.diag.throttle_saturated);
  }
  SUBCASE("filter follows a constant command with time constant tau1") {
    RangeCtrlState c;
    const double dt = 1e-5;
    range_control_step(c, t, {0.0, 25.0, 500.0}, dt, k, pr);  // seeds x1c = 25
    const double e_r = -2.0;  // raises the desired speed to a new constant
    const double x1d = (-t.f0 - k.K0 * e_r - k.k0 * smooth_sign(e_r, k.phi)) / t.g0;
    const int steps = static_cast<int>(std::lround(10 * k.tau1 / dt));
    double worst = 0.0;
    for (int i = 1; i <= steps; ++i) {
      const RangeStepResult r = range_control_step(c, t, {e_r, 25.0, 500.0}, dt, k, pr);
      const double expect = (25.0 - x1d) * std::exp(-(i - 1) * dt / k.tau1);
      worst = std::max(worst, std::abs(r.diag.x1_tilde - expect) / std::abs(25.0 - x1d));
    }
    CHECK(worst < 1e-4);
  }
  SUBCASE("non-positive step is rejected") {
    RangeCtrlState c;
    CHECK_THROWS_AS(range_control_step(c, t, {0.0, 25.0, 500.0}, 0.0, k, pr), Error);
  }
}

TEST_CASE("range gain checker") {
  SUBCASE("loiter gains: filter conditions hold, K0 shortfall reported") {
    const RangeGains k;
    const GainReport r = verify_range_gains(k, {{-1.0, 1.0 / 11.0, 0.2}});
    REQUIRE(r.find("range.1/tau1 > 3/2 + w1"));
    CHECK(r.find("range.1/tau1 > 3/2 + w1")->passed);
    CHECK_NEAR(r.find("range.1/tau1 > 3/2 + w1")->margin, 10.0 - 1.51, 1e-12);
    CHECK(r.find("range.1/tau2 > 3/2 + w1")->passed);
    const GainCondition* k0 = r.find("range.K0 > g0^2/2 + w1");
    REQUIRE(k0);
    CHECK_FALSE(k0->passed);
    CHECK_NEAR(k0->margin, 0.2 - 0.51, 1e-12);
    CHECK(k0->note.find("K0 below the sufficient bound") != std::string::npos);
    CHECK_FALSE(r.all_passed());
  }
  SUBCASE("large gains pass everything") {
    RangeGains k;
    k.K0 = k.K1 = k.K2 = 100.0;
    k.tau1 = k.tau2 = 0.01;
    const GainReport r = verify_range_gains(k, {{-1.0, 1.0 / 11.0, 0.2}, {-0.5, 0.09, 0.3}});
    CHECK(r.all_passed());
  }
  SUBCASE("robust-gain conditions are informational") {
    RangeGains k;
    k.d_bar0 = 10.0;
    const GainReport r = verify_range_gains(k, {{-1.0, 0.09, 0.2}});
    CHECK(r.find("range.k0 > d_bar0")->informational);
    CHECK_FALSE(r.find("range.k0 > d_bar0")->passed);
  }
  SUBCASE("empty sample set") {
    CHECK_THROWS_AS(verify_range_gains(RangeGains{}, {}), Error);
  }
}
