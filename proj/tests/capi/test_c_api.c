/* Exercises the public C header from C, linked against the shared library only. */
#include <math.h>
#include <stdio.h>
#include <string.h>

#include "igc_c.h"

static int failures = 0;

#define EXPECT(cond)                                                  \
  do {                                                                \
    if (!(cond)) {                                                    \
      fprintf(stderr, "%s:%d: expected %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                     \
    }                                                                 \
  } while (0)

static const char* kBadMass =
    "[vehicle]\n"
    "g = 9.81\n";

static void test_errors(void) {
  igc_scenario* sc = NULL;
  EXPECT(igc_scenario_parse(kBadMass, NULL, 0, &sc) == IGC_E_PARSE);
  EXPECT(sc == NULL);
  EXPECT(strcmp(igc_last_error_key(), "vehicle.m_g") == 0);
  EXPECT(strstr(igc_last_error(), "m_g") != NULL);

  EXPECT(igc_scenario_load_file("/nonexistent/file.cfg", NULL, 0, &sc) == IGC_E_IO);
  EXPECT(igc_scenario_parse(kBadMass, NULL, 0, NULL) == IGC_E_INVALID_ARGUMENT);

  EXPECT(igc_scenario_load_file(IGC_TEST_DATA_DIR "/barrier_violation.cfg", NULL, 0, &sc) ==
         IGC_E_INFEASIBLE_INITIAL_CONDITION);
  EXPECT(strcmp(igc_last_error_key(), "barrier.e_gamma") == 0);
  EXPECT(strcmp(igc_status_name(IGC_E_BARRIER_VIOLATION), "barrier_violation") == 0);
}

static void test_run(void) {
  const char* ov[] = {"sim.t_final=30"};
  igc_scenario* sc = NULL;
  igc_result* res = NULL;
  igc_metrics m;
  igc_fault f;
  double t_last = 0.0, e_r0 = 0.0;
  size_t col, e_r_col = 0, rows;
  char* text = NULL;
  igc_scenario* again = NULL;

  EXPECT(igc_scenario_load_file(IGC_CONFIGS_DIR "/scenario1.cfg", ov, 1, &sc) == IGC_OK);
  if (!sc) return;
  EXPECT(strcmp(igc_scenario_name(sc), "scenario1") == 0);
  EXPECT(igc_scenario_warning_count(sc) == 1);

  EXPECT(igc_scenario_serialize(sc, &text) == IGC_OK);
  EXPECT(igc_scenario_parse(text, NULL, 0, &again) == IGC_OK);
  EXPECT(again && igc_scenario_hash(again) == igc_scenario_hash(sc));
  igc_scenario_free(again);
  igc_string_free(text);

  EXPECT(igc_run(sc, &res) == IGC_OK);
  if (!res) {
    igc_scenario_free(sc);
    return;
  }
  rows = igc_result_row_count(res);
  EXPECT(rows == 601);
  for (col = 0; col < igc_column_count(); ++col) {
    if (strcmp(igc_column_name(col), "e_r_m") == 0) e_r_col = col;
  }
  EXPECT(igc_result_value(res, 0, e_r_col, &e_r0) == IGC_OK);
  EXPECT(e_r0 == 100.0);
  EXPECT(igc_result_value(res, rows - 1, 0, &t_last) == IGC_OK);
  EXPECT(fabs(t_last - 30.0) < 1e-9);
  EXPECT(igc_result_value(res, rows, 0, &t_last) == IGC_E_INVALID_ARGUMENT);

  EXPECT(igc_result_metrics(res, &m) == IGC_OK);
  EXPECT(m.rows == rows);
  EXPECT(fabs(m.settle_range_s - 21.6) < 1e-9);
  EXPECT(!m.faulted);
  EXPECT(igc_result_fault(res, &f) == 0);

  EXPECT(igc_result_metrics_json(res, &text) == IGC_OK);
  EXPECT(text && strstr(text, "\"scenario\": \"scenario1\"") != NULL);
  igc_string_free(text);

  igc_result_free(res);
  igc_scenario_free(sc);
}

static void test_fault(void) {
  const char* ov[] = {"leader.loiter_chi_rate=3", "sim.t_final=30"};
  igc_scenario* sc = NULL;
  igc_result* res = NULL;
  igc_fault f;
  EXPECT(igc_scenario_load_file(IGC_CONFIGS_DIR "/scenario1.cfg", ov, 2, &sc) == IGC_OK);
  EXPECT(igc_run(sc, &res) == IGC_OK);
  if (res) {
    EXPECT(igc_result_fault(res, &f) == 1);
    EXPECT(strcmp(f.code, "barrier_violation") == 0);
    EXPECT(strcmp(f.guard, "barrier.e_chi") == 0);
  }
  igc_result_free(res);
  igc_scenario_free(sc);
}

static void test_selftest(void) {
  char* text = NULL;
  int passed = 0;
  EXPECT(igc_selftest(&text, &passed) == IGC_OK);
  EXPECT(passed == 1);
  EXPECT(text && strlen(text) > 0);
  igc_string_free(text);
}

int main(void) {
  EXPECT(strlen(igc_version()) > 0);
  test_errors();
  test_run();
  test_fault();
  test_selftest();
  igc_scenario_free(NULL);
  igc_result_free(NULL);
  if (failures) {
    fprintf(stderr, "%d C API check(s) failed\n", failures);
    return 1;
  }
  printf("C API checks passed\n");
  return 0;
}
