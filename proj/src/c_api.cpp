#include "igc_c.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <limits>
#include <new>
#include <string>
#include <vector>

#include "igc/config.hpp"
#include "igc/error.hpp"
#include "igc/selftest.hpp"
#include "igc/sim_engine.hpp"
#include "igc/trajectory_io.hpp"

struct igc_scenario {
  igc::ScenarioConfig config;
  std::vector<std::string> warnings;
  std::uint64_t hash = 0;
};

struct igc_result {
  igc::ScenarioConfig config;
  igc::TrajectoryLog log;
  igc::MetricsReport metrics;
};

namespace {

thread_local std::string g_error;
thread_local std::string g_error_key;

igc_status status_of(igc::ErrorCode code) {
  using igc::ErrorCode;
  switch (code) {
    case ErrorCode::Config: return IGC_E_CONFIG;
    case ErrorCode::Parse: return IGC_E_PARSE;
    case ErrorCode::Io: return IGC_E_IO;
    case ErrorCode::SingularState: return IGC_E_SINGULAR_STATE;
    case ErrorCode::DegenerateGeometry: return IGC_E_DEGENERATE_GEOMETRY;
    case ErrorCode::LossOfControllability: return IGC_E_LOSS_OF_CONTROLLABILITY;
    case ErrorCode::InfeasibleThrust: return IGC_E_INFEASIBLE_THRUST;
    case ErrorCode::InfeasibleInitialCondition: return IGC_E_INFEASIBLE_INITIAL_CONDITION;
    case ErrorCode::BarrierViolation: return IGC_E_BARRIER_VIOLATION;
    case ErrorCode::ActuationSingularity: return IGC_E_ACTUATION_SINGULARITY;
  }
  return IGC_E_INTERNAL;
}

igc_status fail(igc_status status, std::string key, std::string message) {
  g_error_key = std::move(key);
  g_error = std::move(message);
  return status;
}

// Runs `body`, translating every exception into a status; nothing escapes.
template <class Body>
igc_status guarded(Body&& body) {
  g_error.clear();
  g_error_key.clear();
  try {
    body();
    return IGC_OK;
  } catch (const igc::Error& e) {
    return fail(status_of(e.code()), e.guard(), e.what());
  } catch (const std::bad_alloc&) {
    return fail(IGC_E_INTERNAL, "memory", "out of memory");
  } catch (const std::exception& e) {
    return fail(IGC_E_INTERNAL, "internal", e.what());
  } catch (...) {
    return fail(IGC_E_INTERNAL, "internal", "unknown exception");
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::vector<igc::ConfigOverride> read_overrides(const char* const* overrides, size_t n) {
  std::vector<igc::ConfigOverride> out;
  for (size_t i = 0; i < n; ++i) {
    if (!overrides[i]) throw igc::Error(igc::ErrorCode::Parse, "override", "null override string");
    out.push_back(igc::parse_override(overrides[i]));
  }
  return out;
}

igc_scenario* make_scenario(igc::ParsedConfig parsed) {
  auto* s = new igc_scenario;
  s->config = std::move(parsed.config);
  s->warnings = std::move(parsed.warnings);
  s->hash = igc::config_hash(s->config);
  return s;
}

double or_nan(const std::optional<double>& v) {
  return v ? *v : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

extern "C" {

const char* igc_version(void) { return "1.0.0"; }

const char* igc_status_name(igc_status status) {
  switch (status) {
    case IGC_OK: return "ok";
    case IGC_E_INVALID_ARGUMENT: return "invalid_argument";
    case IGC_E_CONFIG: return "config";
    case IGC_E_PARSE: return "parse";
    case IGC_E_IO: return "io";
    case IGC_E_SINGULAR_STATE: return "singular_state";
    case IGC_E_DEGENERATE_GEOMETRY: return "degenerate_geometry";
    case IGC_E_LOSS_OF_CONTROLLABILITY: return "loss_of_controllability";
    case IGC_E_INFEASIBLE_THRUST: return "infeasible_thrust";
    case IGC_E_INFEASIBLE_INITIAL_CONDITION: return "infeasible_initial_condition";
    case IGC_E_BARRIER_VIOLATION: return "barrier_violation";
    case IGC_E_ACTUATION_SINGULARITY: return "actuation_singularity";
    case IGC_E_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* igc_last_error(void) { return g_error.c_str(); }
const char* igc_last_error_key(void) { return g_error_key.c_str(); }

void igc_string_free(char* s) { std::free(s); }

igc_status igc_scenario_load_file(const char* path, const char* const* overrides,
                                  size_t n_overrides, igc_scenario** out) {
  if (!path || !out || (n_overrides && !overrides)) {
    return fail(IGC_E_INVALID_ARGUMENT, "argument", "null argument");
  }
  *out = nullptr;
  return guarded([&] {
    const auto ov = read_overrides(overrides, n_overrides);
    *out = make_scenario(igc::load_config_file(path, ov));
  });
}

igc_status igc_scenario_parse(const char* text, const char* const* overrides,
                              size_t n_overrides, igc_scenario** out) {
  if (!text || !out || (n_overrides && !overrides)) {
    return fail(IGC_E_INVALID_ARGUMENT, "argument", "null argument");
  }
  *out = nullptr;
  return guarded([&] {
    const auto ov = read_overrides(overrides, n_overrides);
    *out = make_scenario(igc::parse_config(text, ov));
  });
}

void igc_scenario_free(igc_scenario* scenario) { delete scenario; }

igc_status igc_scenario_serialize(const igc_scenario* scenario, char** out) {
  if (!scenario || !out) return fail(IGC_E_INVALID_ARGUMENT, "argument", "null argument");
  *out = nullptr;
  return guarded([&] { *out = dup_string(igc::serialize_config(scenario->config)); });
}

uint64_t igc_scenario_hash(const igc_scenario* scenario) { return scenario ? scenario->hash : 0; }

const char* igc_scenario_name(const igc_scenario* scenario) {
  return scenario ? scenario->config.name.c_str() : "";
}

const char* igc_scenario_trajectory_path(const igc_scenario* scenario) {
  return scenario ? scenario->config.output.trajectory.c_str() : "";
}

const char* igc_scenario_metrics_path(const igc_scenario* scenario) {
  return scenario ? scenario->config.output.metrics.c_str() : "";
}

size_t igc_scenario_warning_count(const igc_scenario* scenario) {
  return scenario ? scenario->warnings.size() : 0;
}

const char* igc_scenario_warning(const igc_scenario* scenario, size_t index) {
  if (!scenario || index >= scenario->warnings.size()) return nullptr;
  return scenario->warnings[index].c_str();
}

igc_status igc_run(const igc_scenario* scenario, igc_result** out) {
  if (!scenario || !out) return fail(IGC_E_INVALID_ARGUMENT, "argument", "null argument");
  *out = nullptr;
  return guarded([&] {
    igc::ScenarioResult run = igc::run_scenario(scenario->config);
    auto* r = new igc_result{scenario->config, std::move(run.log), std::move(run.metrics)};
    r->log.config_hash = scenario->hash;
    *out = r;
  });
}

void igc_result_free(igc_result* result) { delete result; }

size_t igc_column_count(void) { return igc::trajectory_columns().size(); }

const char* igc_column_name(size_t column) {
  const auto cols = igc::trajectory_columns();
  return column < cols.size() ? cols[column].name : nullptr;
}

size_t igc_result_row_count(const igc_result* result) {
  return result ? result->log.rows.size() : 0;
}

igc_status igc_result_value(const igc_result* result, size_t row, size_t column, double* out) {
  if (!result || !out) return fail(IGC_E_INVALID_ARGUMENT, "argument", "null argument");
  const auto cols = igc::trajectory_columns();
  if (row >= result->log.rows.size() || column >= cols.size()) {
    return fail(IGC_E_INVALID_ARGUMENT, "index", "row or column out of range");
  }
  *out = result->log.rows[row].*(cols[column].field);
  return IGC_OK;
}

igc_status igc_result_metrics(const igc_result* result, igc_metrics* out) {
  if (!result || !out) return fail(IGC_E_INVALID_ARGUMENT, "argument", "null argument");
  const igc::MetricsReport& m = result->metrics;
  *out = igc_metrics{};
  out->settle_range_s = or_nan(m.range.time);
  out->settle_elevation_s = or_nan(m.elevation.time);
  out->settle_azimuth_s = or_nan(m.azimuth.time);
  out->settle_all_s = or_nan(m.settled_all);
  out->max_after_range_m = m.range.max_after;
  out->max_after_elevation_rad = m.elevation.max_after;
  out->max_after_azimuth_rad = m.azimuth.max_after;
  out->band_range_m = m.band_range;
  out->band_angle_rad = m.band_angle;
  out->min_margin_gamma_rad = m.min_margin_gamma;
  out->min_margin_chi_rad = m.min_margin_chi;
  out->behind_fraction = m.behind_fraction;
  out->min_cos_sigma_f_after = m.min_cos_sigma_f_after;
  out->max_speed_mismatch_after_mps = m.max_speed_mismatch_after;
  out->speed_relation_residual_mps = m.speed_relation_residual;
  out->speed_relation_samples = m.speed_relation_samples;
  out->throttle_sat_duty = m.throttle_sat_duty;
  out->surface_sat_duty = m.surface_sat_duty;
  out->speed_cmd_sat_duty = m.speed_cmd_sat_duty;
  out->thrust_sat_duty = m.thrust_sat_duty;
  out->alpha_cmd_sat_duty = m.alpha_cmd_sat_duty;
  out->rows = m.rows;
  out->t_end_s = m.t_end;
  out->faulted = m.faulted ? 1 : 0;
  return IGC_OK;
}

int igc_result_fault(const igc_result* result, igc_fault* out) {
  if (!result || !result->log.fault) return 0;
  if (out) {
    const igc::FaultRecord& f = *result->log.fault;
    *out = igc_fault{f.t, f.code.c_str(), f.guard.c_str(), f.message.c_str()};
  }
  return 1;
}

igc_status igc_result_write_csv(const igc_result* result, const char* path, int deterministic) {
  if (!result || !path) return fail(IGC_E_INVALID_ARGUMENT, "argument", "null argument");
  return guarded([&] {
    igc::CsvOptions opt;
    if (!deterministic) opt.timestamp = igc::utc_timestamp();
    igc::write_text_file(path, igc::write_trajectory(result->log, opt));
  });
}

igc_status igc_result_write_metrics(const igc_result* result, const char* path) {
  if (!result || !path) return fail(IGC_E_INVALID_ARGUMENT, "argument", "null argument");
  return guarded([&] {
    igc::write_text_file(path, igc::metrics_json(result->config, result->log, result->metrics));
  });
}

igc_status igc_result_metrics_json(const igc_result* result, char** out) {
  if (!result || !out) return fail(IGC_E_INVALID_ARGUMENT, "argument", "null argument");
  *out = nullptr;
  return guarded([&] {
    *out = dup_string(igc::metrics_json(result->config, result->log, result->metrics));
  });
}

igc_status igc_verify(const igc_scenario* scenario, char** report_text, char** report_json,
                      int* all_passed) {
  if (!scenario) return fail(IGC_E_INVALID_ARGUMENT, "argument", "null argument");
  if (report_text) *report_text = nullptr;
  if (report_json) *report_json = nullptr;
  return guarded([&] {
    const igc::GainVerification v = igc::verify_scenario(scenario->config);
    std::string text = "range channel\n" + igc::gain_report_text(v.range) +
                       "bearing channel\n" + igc::gain_report_text(v.bearing);
    text += std::string("formation feasibility: ") +
            (v.feasibility.feasible() ? "feasible" : "NOT feasible") + "\n";
    for (const auto& w : scenario->warnings) text += "warning: " + w + "\n";
    if (v.fault) {
      text += "note: sampling run stopped at t = " + std::to_string(v.fault->t) + " s (" +
              v.fault->guard + ")\n";
    }
    std::string json =
        igc::gain_report_json(scenario->config, v.range, v.bearing, v.feasibility);
    if (report_text) *report_text = dup_string(text);
    if (report_json) *report_json = dup_string(json);
    if (all_passed) *all_passed = v.range.all_passed() && v.bearing.all_passed();
  });
}

igc_status igc_selftest(char** report_text, int* passed) {
  if (report_text) *report_text = nullptr;
  return guarded([&] {
    const igc::SelftestReport rep = igc::run_selftest();
    std::string text;
    char buf[64];
    for (const auto& c : rep.checks) {
      std::snprintf(buf, sizeof buf, "%.3e", c.value);
      text += std::string(c.passed ? "pass" : "FAIL") + "  " + c.name + "  value=" + buf;
      if (c.lower > 0.0) {
        std::snprintf(buf, sizeof buf, " (accepted [%g, %g])", c.lower, c.threshold);
      } else {
        std::snprintf(buf, sizeof buf, " (limit %g)", c.threshold);
      }
      text += buf;
      text += "  " + c.detail + "\n";
    }
    std::snprintf(buf, sizeof buf, "%.3f", rep.seconds);
    text += std::string("selftest ") + (rep.passed() ? "passed" : "FAILED") + " in " + buf + " s\n";
    if (report_text) *report_text = dup_string(text);
    if (passed) *passed = rep.passed() ? 1 : 0;
  });
}

}  // extern "C"
