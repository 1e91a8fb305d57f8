// igcsim: command-line front end to libigc.
//
// Exit status: 0 success, 1 a run faulted, 2 usage/config/IO error,
// 3 selftest failure. Errors also produce one JSON line on stderr.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "igc_c.h"

namespace {

constexpr int kExitFault = 1;
constexpr int kExitError = 2;
constexpr int kExitSelftest = 3;

struct GlobalOptions {
  bool deterministic = false;
  std::optional<int> log_decimation;
  std::optional<double> dt;
  std::optional<double> t_final;
  std::vector<std::string> sets;  // key=value overrides
};

int report_error(igc_status status) {
  const nlohmann::json line = {{"error", igc_status_name(status)},
                               {"key", igc_last_error_key()},
                               {"message", igc_last_error()}};
  std::fprintf(stderr, "%s\n", line.dump().c_str());
  return kExitError;
}

int report_error(const std::string& kind, const std::string& key, const std::string& message) {
  const nlohmann::json line = {{"error", kind}, {"key", key}, {"message", message}};
  std::fprintf(stderr, "%s\n", line.dump().c_str());
  return kExitError;
}

std::string format17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> overrides_from(const GlobalOptions& g) {
  std::vector<std::string> out = g.sets;
  if (g.dt) out.push_back("sim.dt=" + format17(*g.dt));
  if (g.t_final) out.push_back("sim.t_final=" + format17(*g.t_final));
  if (g.log_decimation) out.push_back("sim.log_decimation=" + std::to_string(*g.log_decimation));
  return out;
}

struct Scenario {
  igc_scenario* ptr = nullptr;
  ~Scenario() { igc_scenario_free(ptr); }
};

struct Result {
  igc_result* ptr = nullptr;
  ~Result() { igc_result_free(ptr); }
};

igc_status load(const std::string& path, const std::vector<std::string>& overrides,
                Scenario& out) {
  std::vector<const char*> argv;
  for (const auto& s : overrides) argv.push_back(s.c_str());
  return igc_scenario_load_file(path.c_str(), argv.data(), argv.size(), &out.ptr);
}

std::string settle_text(double t) {
  if (std::isnan(t)) return "never";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g s", t);
  return buf;
}

void print_summary(const igc_metrics& m) {
  std::printf("rows: %zu  t_end: %g s\n", m.rows, m.t_end_s);
  std::printf("settling: range %s, elevation %s, azimuth %s\n",
              settle_text(m.settle_range_s).c_str(), settle_text(m.settle_elevation_s).c_str(),
              settle_text(m.settle_azimuth_s).c_str());
  std::printf("max after settling: |e_r| %.4g m, |e_gamma| %.4g deg, |e_chi| %.4g deg\n",
              m.max_after_range_m, m.max_after_elevation_rad * 180.0 / M_PI,
              m.max_after_azimuth_rad * 180.0 / M_PI);
  std::printf("barrier margin min: gamma %.4g deg, chi %.4g deg\n",
              m.min_margin_gamma_rad * 180.0 / M_PI, m.min_margin_chi_rad * 180.0 / M_PI);
  std::printf("speed relation residual: %.3g m/s over %zu samples\n",
              m.speed_relation_residual_mps, m.speed_relation_samples);
}

// Runs one scenario and writes its files; returns the exit status.
int run_one(const Scenario& sc, const std::string& csv_path, const std::string& metrics_path,
            bool deterministic, bool quiet) {
  for (size_t i = 0; i < igc_scenario_warning_count(sc.ptr); ++i) {
    std::fprintf(stderr, "warning: %s\n", igc_scenario_warning(sc.ptr, i));
  }
  Result res;
  if (igc_status st = igc_run(sc.ptr, &res.ptr); st != IGC_OK) return report_error(st);
  if (igc_status st = igc_result_write_csv(res.ptr, csv_path.c_str(), deterministic); st != IGC_OK) {
    return report_error(st);
  }
  if (igc_status st = igc_result_write_metrics(res.ptr, metrics_path.c_str()); st != IGC_OK) {
    return report_error(st);
  }
  igc_metrics m;
  igc_result_metrics(res.ptr, &m);
  if (!quiet) {
    std::printf("trajectory: %s\nmetrics: %s\n", csv_path.c_str(), metrics_path.c_str());
    print_summary(m);
  }
  igc_fault f;
  if (igc_result_fault(res.ptr, &f)) {
    report_error(f.code, f.guard, "run aborted at t = " + format17(f.t_s) + " s: " + f.message);
    return kExitFault;
  }
  return 0;
}

std::string default_path(const std::string& configured, const std::string& out_dir,
                         const std::string& name, const char* suffix) {
  if (!configured.empty() && out_dir.empty()) return configured;
  std::filesystem::path p = std::filesystem::path(out_dir.empty() ? "." : out_dir);
  return (p / (name + suffix)).string();
}

// "key=a,b,c" -> key and its values.
bool split_sweep(const std::string& spec, std::string& key, std::vector<std::string>& values) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0) return false;
  key = spec.substr(0, eq);
  values.clear();
  std::string rest = spec.substr(eq + 1);
  size_t start = 0;
  while (true) {
    const auto comma = rest.find(',', start);
    values.push_back(rest.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  for (const auto& v : values) {
    if (v.empty()) return false;
  }
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Leader-follower formation IGC simulator"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_flag("--deterministic", g.deterministic, "Omit the timestamp from trajectory files");
  app.add_option("--log-decimation", g.log_decimation, "Log every N-th step (overrides sim.log_decimation)")
      ->check(CLI::PositiveNumber);
  app.add_option("--dt", g.dt, "Integration step in s (overrides sim.dt)");
  app.add_option("--t-final", g.t_final, "Simulated time in s (overrides sim.t_final)");

  std::string config_path, out_dir, csv_override, metrics_override, json_path;

  auto* run = app.add_subcommand("run", "Run a scenario, write trajectory CSV and metrics JSON");
  run->add_option("config", config_path, "Scenario file")->required()->check(CLI::ExistingFile);
  run->add_option("--set", g.sets, "Override a key: section.key=value (repeatable)");
  run->add_option("--out-dir", out_dir, "Directory for output files");
  run->add_option("--trajectory", csv_override, "Trajectory CSV path");
  run->add_option("--metrics", metrics_override, "Metrics JSON path");

  auto* verify = app.add_subcommand("verify", "Report gain conditions and formation feasibility");
  verify->add_option("config", config_path, "Scenario file")->required()->check(CLI::ExistingFile);
  verify->add_option("--set", g.sets, "Override a key: section.key=value (repeatable)");
  verify->add_option("--json", json_path, "Also write the report as JSON");

  std::vector<std::string> sweeps;
  auto* sweep = app.add_subcommand("sweep", "Cartesian parameter sweep, one run per combination");
  sweep->add_option("config", config_path, "Scenario file")->required()->check(CLI::ExistingFile);
  sweep->add_option("--set", sweeps, "section.key=a,b,c (repeatable)")->required();
  sweep->add_option("--out-dir", out_dir, "Directory for output files");

  auto* selftest = app.add_subcommand("selftest", "Run the numerical oracle suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return report_error("usage", "argv", e.what());
  }

  if (*selftest) {
    char* text = nullptr;
    int passed = 0;
    if (igc_status st = igc_selftest(&text, &passed); st != IGC_OK) return report_error(st);
    std::fputs(text, stdout);
    igc_string_free(text);
    if (!passed) {
      report_error("selftest", "selftest", "one or more oracle checks failed");
      return kExitSelftest;
    }
    return 0;
  }

  if (*run) {
    Scenario sc;
    if (igc_status st = load(config_path, overrides_from(g), sc); st != IGC_OK) return report_error(st);
    const std::string name = igc_scenario_name(sc.ptr);
    const std::string csv = !csv_override.empty()
                                ? csv_override
                                : default_path(igc_scenario_trajectory_path(sc.ptr), out_dir, name, ".csv");
    const std::string met = !metrics_override.empty()
                                ? metrics_override
                                : default_path(igc_scenario_metrics_path(sc.ptr), out_dir, name,
                                               ".metrics.json");
    return run_one(sc, csv, met, g.deterministic, false);
  }

  if (*verify) {
    Scenario sc;
    if (igc_status st = load(config_path, overrides_from(g), sc); st != IGC_OK) return report_error(st);
    char* text = nullptr;
    char* json = nullptr;
    int all_passed = 0;
    if (igc_status st = igc_verify(sc.ptr, &text, &json, &all_passed); st != IGC_OK) {
      return report_error(st);
    }
    std::fputs(text, stdout);
    std::printf("%s\n", all_passed ? "all gain conditions hold"
                                   : "some sufficient gain conditions do not hold (see FAIL lines)");
    int rc = 0;
    if (!json_path.empty()) {
      std::FILE* f = std::fopen(json_path.c_str(), "wb");
      if (!f || std::fputs(json, f) < 0) rc = report_error("io", "json", "cannot write " + json_path);
      if (f) std::fclose(f);
    }
    igc_string_free(text);
    igc_string_free(json);
    return rc;
  }

  // sweep
  std::vector<std::string> keys;
  std::vector<std::vector<std::string>> values;
  for (const auto& spec : sweeps) {
    std::string key;
    std::vector<std::string> vals;
    if (!split_sweep(spec, key, vals)) return report_error("usage", spec, "expected --set key=a,b,c");
    keys.push_back(key);
    values.push_back(vals);
  }
  std::vector<size_t> idx(keys.size(), 0);
  int worst = 0;
  for (size_t combo = 0;; ++combo) {
    std::vector<std::string> ov = overrides_from(g);
    std::string label;
    for (size_t k = 0; k < keys.size(); ++k) {
      ov.push_back(keys[k] + "=" + values[k][idx[k]]);
      label += (k ? " " : "") + keys[k] + "=" + values[k][idx[k]];
    }
    Scenario sc;
    int rc = 0;
    if (igc_status st = load(config_path, ov, sc); st != IGC_OK) {
      rc = report_error(st);
    } else {
      const std::string stem = std::string(igc_scenario_name(sc.ptr)) + "_" + std::to_string(combo);
      std::filesystem::path dir = std::filesystem::path(out_dir.empty() ? "." : out_dir);
      rc = run_one(sc, (dir / (stem + ".csv")).string(), (dir / (stem + ".metrics.json")).string(),
                   g.deterministic, true);
    }
    std::printf("%zu  %s  %s\n", combo, label.c_str(),
                rc == 0 ? "ok" : (rc == kExitError ? "error" : "fault"));
    worst = std::max(worst, rc);

    size_t k = 0;
    while (k < keys.size() && ++idx[k] == values[k].size()) idx[k++] = 0;
    if (k == keys.size()) break;
  }
  return worst;
}
