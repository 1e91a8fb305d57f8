#include <regex>
#include <string>

#include <doctest.h>

#include "igc/config.hpp"
#include "igc/error.hpp"
#include "igc/trajectory_io.hpp"
#include "test_support.hpp"

using namespace igc;

namespace {

std::string configs(const char* file) { return std::string(IGC_CONFIGS_DIR) + "/" + file; }

std::string scenario1_text() { return read_text_file(configs("scenario1.cfg")); }

// Drops the first line matching `key = ...` inside the text.
std::string without_key(std::string text, const std::string& key) {
  const std::regex line("(^|\n)" + key + " = [^\n]*");
  return std::regex_replace(text, line, "", std::regex_constants::format_first_only);
}

ScenarioConfig reference_loiter() {
  ScenarioConfig c;
  c.name = "scenario1";
  c.vehicle = aerosonde_params();
  c.leader.kind = LeaderKind::AscendingLoiter;
  c.leader.V = 25.0;
  c.leader.pos0 = {100.0, 100.0, -1000.0};
  c.leader.gamma0 = Degrees{10.0};
  c.leader.loiter_chi_rate = 0.1;
  c.follower.pos = {0.0, 0.0, -1050.0};
  c.follower.V = 25.0;
  c.formation.r_d = 50.0;
  c.formation.ebar_gamma = Degrees{80.0};
  c.formation.ebar_chi = Degrees{90.0};
  c.sim.dt = 0.005;
  c.sim.t_final = 120.0;
  c.sim.log_decimation = 10;
  return c;
}

Error parse_failure(const std::string& text, std::span<const ConfigOverride> ov = {}) {
  try {
    parse_config(text, ov);
  } catch (const Error& e) {
    return e;
  }
  FAIL("expected a parse failure");
  return Error(ErrorCode::Parse, "", "");
}

}  // namespace

TEST_CASE("shipped scenarios") {
  SUBCASE("loiter file equals the reference scenario") {
    const ParsedConfig p = load_config_file(configs("scenario1.cfg"));
    CHECK(p.config == reference_loiter());
    REQUIRE(p.warnings.size() == 1);
    CHECK(p.warnings[0].find("ebar_chi") != std::string::npos);
  }
  SUBCASE("lazy-eight files are feasible formations") {
    for (const char* f : {"lazy8_f1.cfg", "lazy8_f2.cfg", "lazy8_f3.cfg", "lazy8_f4.cfg"}) {
      const ParsedConfig p = load_config_file(configs(f));
      CHECK(p.config.leader.kind == LeaderKind::Lazy8);
      CHECK(p.warnings.empty());
      CHECK(std::abs(p.config.formation.sigma_fd_gamma.deg) == 30.0);
      CHECK(std::abs(p.config.formation.sigma_fd_chi.deg) == 30.0);
    }
  }
}

TEST_CASE("config parsing errors") {
  const std::string base = scenario1_text();

  SUBCASE("missing vehicle mass names the key") {
    const Error e = parse_failure(without_key(base, "m_g"));
    CHECK(e.code() == ErrorCode::Parse);
    CHECK(e.guard() == "vehicle.m_g");
  }
  SUBCASE("unknown key") {
    const Error e = parse_failure(base + "\n[sim]\nfoo = 1\n");
    CHECK(e.code() == ErrorCode::Parse);
    CHECK(e.guard() == "sim.foo");
    const Error u = parse_failure(std::regex_replace(base, std::regex("\nm_g ="), "\nmass ="));
    CHECK(u.guard() == "vehicle.mass");
  }
  SUBCASE("duplicate key carries the line number") {
    const Error e = parse_failure(std::regex_replace(base, std::regex("\nm_g = 11"), "\nm_g = 11\nm_g = 12"));
    CHECK(e.guard() == "vehicle.m_g");
    CHECK(std::string(e.what()).rfind("line 7:", 0) == 0);
  }
  SUBCASE("non-numeric value") {
    const Error e = parse_failure(std::regex_replace(base, std::regex("\nrho = 1.2682"), "\nrho = thick"));
    CHECK(e.guard() == "vehicle.rho");
    CHECK(std::string(e.what()).find("finite number") != std::string::npos);
  }
  SUBCASE("invalid value is a config error at its line") {
    const Error e = parse_failure(std::regex_replace(base, std::regex("\ndt = 0.005"), "\ndt = -1"));
    CHECK(e.code() == ErrorCode::Config);
    CHECK(e.guard() == "sim.dt");
  }
  SUBCASE("starting outside the barrier") {
    const Error e = parse_failure(read_text_file(std::string(IGC_TEST_DATA_DIR) + "/barrier_violation.cfg"));
    CHECK(e.code() == ErrorCode::InfeasibleInitialCondition);
    CHECK(e.guard() == "barrier.e_gamma");
  }
}

TEST_CASE("config overrides") {
  const std::string base = scenario1_text();
  const ConfigOverride o = parse_override("sim.dt=0.0025");
  CHECK(o.key == "sim.dt");
  CHECK(o.value == "0.0025");
  const std::vector<ConfigOverride> ov{o, parse_override("formation.r_d=60")};
  const ParsedConfig p = parse_config(base, ov);
  CHECK(p.config.sim.dt == 0.0025);
  CHECK(p.config.formation.r_d == 60.0);

  CHECK_THROWS_AS(parse_override("sim.dt"), Error);
  const std::vector<ConfigOverride> bad{parse_override("sim.nope=1")};
  CHECK(parse_failure(base, bad).guard() == "sim.nope");
}

TEST_CASE("config round trip") {
  ScenarioConfig c = load_config_file(configs("lazy8_f3.cfg")).config;
  c.vehicle.CLq = 1.0 / 3.0;
  c.range.K0 = 0.1 + 0.2;
  c.sim.disturbance.seed = 0xffffffffffffULL;
  const ScenarioConfig back = parse_config(serialize_config(c)).config;
  CHECK(back == c);
  CHECK(config_hash(back) == config_hash(c));
  c.range.K0 = std::nextafter(c.range.K0, 1.0);
  CHECK(config_hash(back) != config_hash(c));
}

TEST_CASE("angle keys are written in degrees") {
  // Aerodynamic derivatives and per-axis gains are named after angles but are
  // not angles themselves.
  for (const std::string& key : config_keys()) {
    if (key.rfind("vehicle.", 0) == 0 || key.rfind("gains.", 0) == 0) continue;
    for (const char* word : {"gamma", "chi", "alpha", "mu", "sigma", "ebar", "deflection"}) {
      if (key.find(word) != std::string::npos && key.find("rate") == std::string::npos) {
        CHECK_MESSAGE(key.substr(key.size() - 4) == "_deg", key);
      }
    }
  }
}

TEST_CASE("leader table") {
  const auto t = parse_leader_table("t_s, gamma_dot_radps, chi_dot_radps\n0, 0, 0.1\n5, 0.01, 0.1\n");
  REQUIRE(t.size() == 2);
  CHECK(t[1].t == 5.0);
  CHECK(t[1].gamma_dot == 0.01);
  CHECK_THROWS_AS(parse_leader_table("0, 1\n"), Error);
}

TEST_CASE("trajectory files") {
  ScenarioConfig c = load_config_file(configs("scenario1.cfg")).config;
  c.sim.t_final = 20.0;
  ScenarioResult r = run_scenario(c);
  r.log.config_hash = config_hash(c);

  SUBCASE("one row: comments, header, row") {
    TrajectoryLog one = r.log;
    one.rows.resize(1);
    one.warnings.clear();
    const std::string text = write_trajectory(one);
    std::vector<std::string> lines;
    for (std::size_t a = 0, b; a < text.size(); a = b + 1) {
      b = text.find('\n', a);
      lines.push_back(text.substr(a, b - a));
    }
    REQUIRE(lines.size() == 4);
    CHECK(lines[0] == "#config_hash: " + hex64(config_hash(c)));
    CHECK(lines[1] == "#disturbance_seed: 0");
    CHECK(lines[2].rfind("t_s,leader_x_m,", 0) == 0);
    CHECK(std::count(lines[2].begin(), lines[2].end(), ',') + 1 ==
          static_cast<long>(trajectory_columns().size()));
    CHECK(lines[3].rfind("0,100,100,-1000,25,", 0) == 0);
  }
  SUBCASE("exact round trip") {
    const TrajectoryLog back = read_trajectory(write_trajectory(r.log));
    CHECK(back.rows == r.log.rows);
    CHECK(back.config_hash == r.log.config_hash);
    CHECK(back.warnings == r.log.warnings);
  }
  SUBCASE("metrics recomputed from the file are identical") {
    const TrajectoryLog back = read_trajectory(write_trajectory(r.log));
    const MetricsReport m = compute_metrics(back, metric_bands(c));
    CHECK(m.range.time == r.metrics.range.time);
    CHECK(m.azimuth.max_after == r.metrics.azimuth.max_after);
    CHECK(m.speed_relation_residual == r.metrics.speed_relation_residual);
    CHECK(metrics_json(c, back, m) == metrics_json(c, r.log, r.metrics));
  }
  SUBCASE("timestamp only when requested") {
    const std::string plain = write_trajectory(r.log);
    CHECK(plain.find("#generated") == std::string::npos);
    CHECK(write_trajectory(r.log) == plain);
    const std::string stamped = write_trajectory(r.log, {"2026-10-15T00:00:00Z"});
    CHECK(stamped.find("#generated: 2026-10-15T00:00:00Z") != std::string::npos);
  }
  SUBCASE("fault record") {
    TrajectoryLog f = r.log;
    f.fault = FaultRecord{7.36, "barrier_violation", "barrier.e_chi", "azimuth bearing error reached its barrier bound"};
    const std::string text = write_trajectory(f);
    CHECK(text.find("#fault: ") != std::string::npos);
    const TrajectoryLog back = read_trajectory(text);
    REQUIRE(back.fault);
    CHECK(*back.fault == *f.fault);
  }
  SUBCASE("malformed rows report their line") {
    std::string text = write_trajectory(r.log);
    text += "1,2,3\n";
    try {
      read_trajectory(text);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::Parse);
      CHECK(std::string(e.what()).find("line") != std::string::npos);
    }
  }
}

TEST_CASE("gain report text") {
  const GainVerification v = verify_scenario(load_config_file(configs("lazy8_f1.cfg")).config);
  const std::string text = gain_report_text(v.range);
  CHECK(text.find("range.K0") != std::string::npos);
  CHECK(text.find("FAIL") != std::string::npos);
  CHECK(text.find("K0 below the sufficient bound") != std::string::npos);
  CHECK(v.feasibility.feasible());
}
