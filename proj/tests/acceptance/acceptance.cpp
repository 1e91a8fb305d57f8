// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "igc/config.hpp"
#include "igc/error.hpp"
#include "igc/selftest.hpp"
#include "igc/sim_engine.hpp"

using namespace igc;

namespace {

int failed = 0;

void report(bool ok, const char* name, const std::string& detail) {
  std::printf("%s %s: %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failed;
}

std::string fmt(const char* f, double a = 0, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ScenarioConfig shipped(const std::string& file) {
  return load_config_file(std::string(IGC_CONFIGS_DIR) + "/" + file).config;
}

// Settled within the bands by 60 s, no fault, barrier respected throughout and
// the leader ahead of the follower's velocity once settled.
bool within_bands(const MetricsReport& m, std::string& detail) {
  const bool settled = m.range.time && m.elevation.time && m.azimuth.time &&
                       *m.range.time <= 60.0 && *m.elevation.time <= 60.0 &&
                       *m.azimuth.time <= 60.0;
  detail = settled ? fmt("settled r/gamma/chi at %.4g/%.4g/%.4g s", *m.range.time,
                         *m.elevation.time, *m.azimuth.time)
                   : std::string("did not settle by 60 s");
  detail += fmt(", max after |e_r| %.3g m, |e_gamma| %.3g deg, |e_chi| %.3g deg",
                m.range.max_after, m.elevation.max_after * 180 / kPi,
                m.azimuth.max_after * 180 / kPi);
  detail += fmt(", min cos(sigma_f) after %.3g", m.min_cos_sigma_f_after);
  if (m.faulted) detail += ", fault " + m.fault_guard;
  return settled && !m.faulted && m.min_cos_sigma_f_after > 0.0 && m.range.max_after <= m.band_range &&
         m.elevation.max_after <= m.band_angle && m.azimuth.max_after <= m.band_angle &&
         m.min_margin_gamma > 0.0 && m.min_margin_chi > 0.0;
}

void selftest_criterion() {
  const SelftestReport r = run_selftest();
  report(r.passed() && r.seconds < 30.0, "selftest oracles pass within 30 s",
         fmt("%.0f checks, %.3g s", static_cast<double>(r.checks.size()), r.seconds));
}

void loiter_criterion() {
  const auto t0 = std::chrono::steady_clock::now();
  const ScenarioResult r = run_scenario(shipped("scenario1.cfg"));
  const double wall = seconds_since(t0);
  std::string detail;
  const bool ok = within_bands(r.metrics, detail);
  report(ok && wall < 60.0, "ascending loiter converges within bands in under 60 s",
         detail + fmt(", runtime %.3g s", wall));
}

void lazy8_criterion() {
  bool ok = true;
  std::string detail;
  for (int i = 1; i <= 4; ++i) {
    const std::string name = "lazy8_f" + std::to_string(i);
    const ScenarioResult r = run_scenario(shipped(name + ".cfg"));
    std::string d;
    const bool in = within_bands(r.metrics, d);
    const double mismatch = r.metrics.max_speed_mismatch_after;
    ok = ok && in && mismatch > 0.1;
    detail += (i > 1 ? "; " : "") + name + (in ? " in band" : " OUT (" + d + ")") +
              fmt(" speed mismatch %.3g m/s", mismatch);
  }
  report(ok, "lazy-eight followers F1-F4 hold formation with V_f != V_l", detail);
}

void random_ic_criterion() {
  ScenarioConfig base = shipped("scenario1.cfg");
  base.sim.t_final = 60.0;
  const double ebar_g = deg2rad(80.0), ebar_c = deg2rad(90.0);
  base.formation.ebar_gamma = Degrees{80.0};
  base.formation.ebar_chi = Degrees{90.0};

  std::mt19937_64 rng(20241015);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int violations = 0, other_faults = 0;
  double worst_margin = 1e9;
  for (int k = 0; k < 50; ++k) {
    const double eg = 0.8 * u(rng) * ebar_g;
    const double ec = 0.8 * u(rng) * ebar_c;
    const double range = 130.0 + 70.0 * u(rng);
    const double chi_L = deg2rad(60.0) * u(rng);
    const double gamma_L = -eg;  // follower level, so e_gamma = eg
    ScenarioConfig c = base;
    c.follower.pos = c.leader.pos0 - range * Eigen::Vector3d(std::cos(gamma_L) * std::cos(chi_L),
                                                             std::cos(gamma_L) * std::sin(chi_L),
                                                             -std::sin(gamma_L));
    c.follower.chi = Degrees{(chi_L + ec) * 180.0 / kPi};
    const ScenarioResult r = run_scenario(c);
    const MetricsReport& m = r.metrics;
    worst_margin = std::min({worst_margin, m.min_margin_gamma, m.min_margin_chi});
    if (m.min_margin_gamma <= 0.0 || m.min_margin_chi <= 0.0 ||
        (m.faulted && m.fault_guard.rfind("barrier", 0) == 0)) {
      ++violations;
    } else if (m.faulted) {
      ++other_faults;
      if (m.fault_guard.empty()) ++violations;  // every abort must name its guard
    }
  }
  report(violations == 0, "bearing errors stay inside the barrier for 50 random starts",
         fmt("%.0f violations, %.0f other faults, smallest margin %.3g deg", violations,
             other_faults, worst_margin * 180.0 / kPi));
}

void speed_relation_criterion() {
  const ScenarioResult r = run_scenario(shipped("scenario1.cfg"));
  const MetricsReport& m = r.metrics;
  report(m.speed_relation_samples > 0 && m.speed_relation_residual < 0.05,
         "V_f cos(sigma_f) = V_l cos(sigma_l) after settling wherever |r'| < 1e-3",
         fmt("residual %.3g m/s over %.0f samples", m.speed_relation_residual,
             static_cast<double>(m.speed_relation_samples)));
}

void step_size_criterion() {
  ScenarioConfig c = shipped("scenario1.cfg");
  const ScenarioResult coarse = run_scenario(c);
  c.sim.dt = 0.0025;
  c.sim.log_decimation = 20;
  const ScenarioResult fine = run_scenario(c);
  const TrajectoryRow& a = coarse.log.rows.back();
  const TrajectoryRow& b = fine.log.rows.back();
  const double band_r = c.sim.band_range, band_a = c.sim.band_angle.rad();
  const double dr = std::abs(a.e_r - b.e_r) / band_r;
  const double dg = std::abs(a.e_gamma - b.e_gamma) / band_a;
  const double dc = std::abs(a.e_chi - b.e_chi) / band_a;
  const bool ok = !coarse.log.fault && !fine.log.fault && std::abs(a.t - b.t) < 1e-9 &&
                  dr < 0.01 && dg < 0.01 && dc < 0.01;
  report(ok, "halving dt moves terminal errors by less than 1% of the bands",
         fmt("relative changes e_r %.2g, e_gamma %.2g, e_chi %.2g", dr, dg, dc));
}

void gain_criterion() {
  const GainVerification v = verify_scenario(shipped("scenario1.cfg"));
  bool filters = true;
  for (const char* n : {"range.1/tau1 > 3/2 + w1", "range.1/tau2 > 3/2 + w1",
                        "bearing.1/tau1 > 3/2 + w2", "bearing.1/tau2 > 3/2 + w2"}) {
    const GainCondition* c = v.range.find(n) ? v.range.find(n) : v.bearing.find(n);
    filters = filters && c && c->passed;
  }
  const GainCondition* k0 = v.range.find("range.K0 > g0^2/2 + w1");
  const bool shortfall = k0 && !k0->passed && !k0->note.empty();
  report(filters && shortfall && !v.fault,
         "filter conditions hold and the K0 shortfall is reported",
         fmt("range K0 margin %.3g", k0 ? k0->margin : NAN) +
             (shortfall ? ", note: " + k0->note : std::string()));
}

}  // namespace

int main() {
  try {
    selftest_criterion();
    loiter_criterion();
    lazy8_criterion();
    random_ic_criterion();
    speed_relation_criterion();
    step_size_criterion();
    gain_criterion();
  } catch (const Error& e) {
    std::printf("FAIL unexpected error: %s (%s)\n", e.what(), e.guard().c_str());
    return 1;
  }
  return failed == 0 ? 0 : 1;
}
