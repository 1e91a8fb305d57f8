/* C interface to the leader-follower formation simulator.
 *
 * Objects are opaque handles owned by the caller and released with the
 * matching *_free function. Every fallible call returns an igc_status; on
 * failure igc_last_error() and igc_last_error_key() describe the problem for
 * the calling thread until its next library call. Strings returned through
 * char** must be released with igc_string_free. */
#ifndef IGC_C_H
#define IGC_C_H

#include <stddef.h>
#include <stdint.h>

#if defined(IGC_BUILDING_LIBRARY)
#define IGC_API __attribute__((visibility("default")))
#else
#define IGC_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum igc_status {
  IGC_OK = 0,
  IGC_E_INVALID_ARGUMENT = 1,
  IGC_E_CONFIG = 2,
  IGC_E_PARSE = 3,
  IGC_E_IO = 4,
  IGC_E_SINGULAR_STATE = 5,
  IGC_E_DEGENERATE_GEOMETRY = 6,
  IGC_E_LOSS_OF_CONTROLLABILITY = 7,
  IGC_E_INFEASIBLE_THRUST = 8,
  IGC_E_INFEASIBLE_INITIAL_CONDITION = 9,
  IGC_E_BARRIER_VIOLATION = 10,
  IGC_E_ACTUATION_SINGULARITY = 11,
  IGC_E_INTERNAL = 99
} igc_status;

typedef struct igc_scenario igc_scenario; /* parsed, validated configuration */
typedef struct igc_result igc_result;     /* trajectory log plus metrics */

/* Settling times are NaN when the error never settled. */
typedef struct igc_metrics {
  double settle_range_s, settle_elevation_s, settle_azimuth_s, settle_all_s;
  double max_after_range_m, max_after_elevation_rad, max_after_azimuth_rad;
  double band_range_m, band_angle_rad;
  double min_margin_gamma_rad, min_margin_chi_rad;
  double behind_fraction;
  double min_cos_sigma_f_after;
  double max_speed_mismatch_after_mps;
  double speed_relation_residual_mps;
  size_t speed_relation_samples;
  double throttle_sat_duty, surface_sat_duty, speed_cmd_sat_duty;
  double thrust_sat_duty, alpha_cmd_sat_duty;
  size_t rows;
  double t_end_s;
  int faulted;
} igc_metrics;

typedef struct igc_fault {
  double t_s;
  const char* code;    /* owned by the result */
  const char* guard;
  const char* message;
} igc_fault;

IGC_API const char* igc_version(void);
IGC_API const char* igc_status_name(igc_status status);
IGC_API const char* igc_last_error(void);
IGC_API const char* igc_last_error_key(void);
IGC_API void igc_string_free(char* s);

/* overrides: n strings of the form "section.key=value", may be NULL if n == 0. */
IGC_API igc_status igc_scenario_load_file(const char* path, const char* const* overrides,
                                          size_t n_overrides, igc_scenario** out);
IGC_API igc_status igc_scenario_parse(const char* text, const char* const* overrides,
                                      size_t n_overrides, igc_scenario** out);
IGC_API void igc_scenario_free(igc_scenario* scenario);

IGC_API igc_status igc_scenario_serialize(const igc_scenario* scenario, char** out);
IGC_API uint64_t igc_scenario_hash(const igc_scenario* scenario);
IGC_API const char* igc_scenario_name(const igc_scenario* scenario);
IGC_API const char* igc_scenario_trajectory_path(const igc_scenario* scenario);
IGC_API const char* igc_scenario_metrics_path(const igc_scenario* scenario);
IGC_API size_t igc_scenario_warning_count(const igc_scenario* scenario);
IGC_API const char* igc_scenario_warning(const igc_scenario* scenario, size_t index);

/* A run that faults still returns IGC_OK; inspect igc_result_fault. */
IGC_API igc_status igc_run(const igc_scenario* scenario, igc_result** out);
IGC_API void igc_result_free(igc_result* result);

IGC_API size_t igc_column_count(void);
IGC_API const char* igc_column_name(size_t column);

IGC_API size_t igc_result_row_count(const igc_result* result);
IGC_API igc_status igc_result_value(const igc_result* result, size_t row, size_t column,
                                    double* out);
IGC_API igc_status igc_result_metrics(const igc_result* result, igc_metrics* out);
/* Returns 1 and fills *out when the run faulted, 0 otherwise. */
IGC_API int igc_result_fault(const igc_result* result, igc_fault* out);

/* deterministic != 0 omits the timestamp comment. */
IGC_API igc_status igc_result_write_csv(const igc_result* result, const char* path,
                                        int deterministic);
IGC_API igc_status igc_result_write_metrics(const igc_result* result, const char* path);
IGC_API igc_status igc_result_metrics_json(const igc_result* result, char** out);

/* Runs the scenario to sample the gain conditions, then reports them.
 * *all_passed excludes informational conditions. */
IGC_API igc_status igc_verify(const igc_scenario* scenario, char** report_text,
                              char** report_json, int* all_passed);

IGC_API igc_status igc_selftest(char** report_text, int* passed);

#ifdef __cplusplus
}
#endif

#endif /* IGC_C_H */
