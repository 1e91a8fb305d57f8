#include "igc/selftest.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

#include "igc/angles.hpp"
#include "igc/integrator.hpp"
#include "igc/range_igc.hpp"
#include "igc/relative_kinematics.hpp"
#include "igc/sim_engine.hpp"
#include "igc/vehicle_dynamics.hpp"

namespace igc {

bool SelftestReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const SelftestCheck& c) { return c.passed; });
}

namespace {

SelftestCheck below(std::string name, double value, double threshold, std::string detail) {
  return {std::move(name), value, threshold, 0.0, value < threshold, std::move(detail)};
}

// Round trip thrust(omega) -> invert_thrust on the branch the inversion
// returns (omega above the vertex of the thrust parabola).
SelftestCheck thrust_inversion(const VehicleParams& pr) {
  double worst = 0.0;
  int admissible = 0, mirror = 0;
  for (int iv = 0; iv <= 40; ++iv) {
    const double V = iv;
    const ThrustQuadratic q = thrust_quadratic(V, pr);
    const double vertex = -q.B / (2.0 * q.A);
    for (int iw = 0; iw <= 95; ++iw) {
      const double omega = 50.0 + 10.0 * iw;
      if (omega < vertex) {
        ++mirror;
        continue;
      }
      const double back = invert_thrust(propeller(V, omega, pr).thrust, V, pr);
      worst = std::max(worst, std::abs(back - omega) / omega);
      ++admissible;
    }
  }
  return below("thrust inversion round trip (relative)", worst, 1e-9,
               std::to_string(admissible) + " admissible points, " + std::to_string(mirror) +
                   " below the thrust-curve vertex skipped");
}

AgentKinematics random_agent(std::mt19937_64& rng, double spread) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  AgentKinematics a;
  a.pos = Eigen::Vector3d(spread * u(rng), spread * u(rng), -1000.0 + 0.3 * spread * u(rng));
  a.V = 20.0 + 5.0 * u(rng);
  a.gamma = 0.4 * u(rng);
  a.chi = kPi * u(rng);
  return a;
}

// Central differences of relative_state along straight-line motion.
SelftestCheck los_rates(std::mt19937_64& rng) {
  constexpr double h = 1e-5;
  double worst = 0.0;
  int pairs = 0;
  while (pairs < 100) {
    const AgentKinematics l = random_agent(rng, 150.0), f = random_agent(rng, 150.0);
    const Eigen::Vector3d d = l.pos - f.pos;
    if (d.norm() < 20.0 || std::hypot(d.x(), d.y()) < 5.0) continue;
    auto shifted = [](AgentKinematics a, double dt) {
      a.pos += dt * a.velocity();
      return a;
    };
    const RelativeState rel = relative_state(l, f);
    const RelativeRates an = relative_rates(l, f, rel);
    const RelativeState p = relative_state(shifted(l, h), shifted(f, h));
    const RelativeState m = relative_state(shifted(l, -h), shifted(f, -h));
    const double fd[3] = {(p.r - m.r) / (2 * h), (p.gamma_L - m.gamma_L) / (2 * h),
                          wrap_pi(p.chi_L - m.chi_L) / (2 * h)};
    const double a[3] = {an.r_dot, an.gamma_L_dot, an.chi_L_dot};
    for (int i = 0; i < 3; ++i) {
      worst = std::max(worst, std::abs(fd[i] - a[i]) / std::max(std::abs(a[i]), 1e-2));
    }
    ++pairs;
  }
  return below("LOS rates vs central differences (relative)", worst, 1e-5,
               "100 random trajectory pairs, h = 1e-5 s");
}

// cos of the 3-D bearing against the normalised velocity . LOS product.
SelftestCheck bearing_cosine(std::mt19937_64& rng) {
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const AgentKinematics l = random_agent(rng, 200.0), f = random_agent(rng, 200.0);
    if ((l.pos - f.pos).norm() < 1.0) continue;
    const RelativeState rel = relative_state(l, f);
    const Eigen::Vector3d los = (l.pos - f.pos).normalized();
    for (const AgentKinematics* a : {&l, &f}) {
      const double oracle = a->velocity().normalized().dot(los);
      worst = std::max(worst, std::abs(bearing_angles(a->gamma, a->chi, rel).cos_sigma - oracle));
    }
  }
  return below("bearing cosine vs vector dot (absolute)", worst, 1e-12, "1000 random geometries");
}

// T(w) - T(w_d) = P_r (w - w_d) holds exactly for a quadratic thrust curve.
SelftestCheck mean_value(std::mt19937_64& rng, const VehicleParams& pr) {
  std::uniform_real_distribution<double> omega(50.0, 1000.0), speed(0.0, 40.0);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double V = speed(rng), w = omega(rng), wd = omega(rng);
    if (std::abs(w - wd) < 1.0) continue;
    const double lhs = propeller(V, w, pr).thrust - propeller(V, wd, pr).thrust;
    const double rhs = mean_value_slope(w, wd, V, pr) * (w - wd);
    worst = std::max(worst, std::abs(lhs - rhs) / std::max(std::abs(lhs), 1.0));
  }
  return below("mean-value thrust identity (relative)", worst, 1e-10, "1000 random pairs");
}

// Open-loop plant from a perturbed trim, 10 s, at h, h/2, h/4.
SelftestCheck rk4_convergence(const VehicleParams& pr) {
  ScenarioConfig c;
  c.vehicle = pr;
  AircraftState s0 = initial_follower_state(c);
  const GammaSet gammas = inertia_gammas(pr);
  const ActuatorCommand cmd = trim_command(s0, pr, gammas);
  s0.alpha += 0.03;
  s0.mu += 0.2;
  s0.beta += 0.03;
  s0.p += 0.2;
  s0.q += 0.1;
  s0.omega -= 30.0;

  auto integrate = [&](double dt) {
    auto x = s0.to_vector();
    const auto steps = std::llround(10.0 / dt);
    auto f = [&](double, const AircraftState::Vector& v) {
      return state_derivative(AircraftState::from_vector(v), cmd, pr, gammas).to_vector();
    };
    for (long long k = 0; k < steps; ++k) x = rk4_step(f, x, static_cast<double>(k) * dt, dt);
    return x;
  };
  const double h = 0.005;
  const auto a = integrate(h), b = integrate(h / 2), d = integrate(h / 4);
  double coarse = 0.0, fine = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    coarse += (a[i] - b[i]) * (a[i] - b[i]);
    fine += (b[i] - d[i]) * (b[i] - d[i]);
  }
  const double ratio = std::sqrt(coarse / fine);
  return {"RK4 self-convergence ratio", ratio, 20.0, 12.0, ratio >= 12.0 && ratio <= 20.0,
          "10 s open-loop plant, dt = 0.005 / 0.0025 / 0.00125 s"};
}

}  // namespace

SelftestReport run_selftest() {
  const auto start = std::chrono::steady_clock::now();
  const VehicleParams pr = aerosonde_params();
  std::mt19937_64 rng(0x5eed);

  SelftestReport rep;
  rep.checks.push_back(thrust_inversion(pr));
  rep.checks.push_back(los_rates(rng));
  rep.checks.push_back(bearing_cosine(rng));
  rep.checks.push_back(mean_value(rng, pr));
  rep.checks.push_back(rk4_convergence(pr));
  rep.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

}  // namespace igc
