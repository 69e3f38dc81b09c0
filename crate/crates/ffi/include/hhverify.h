#ifndef HHVERIFY_H
#define HHVERIFY_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum HhvOverall {
  HHV_OVERALL_ALL_HOLD = 0,
  HHV_OVERALL_VIOLATIONS_FOUND = 1,
  HHV_OVERALL_INPUT_ERROR = 2,
} HhvOverall;

typedef enum HhvStatus {
  HHV_STATUS_OK = 0,
  HHV_STATUS_NULL_POINTER = 1,
  HHV_STATUS_PARSE = 2,
  /**
   * A function is undefined or non-finite somewhere it was evaluated.
   */
  HHV_STATUS_DOMAIN = 3,
  HHV_STATUS_INVALID_ARGUMENT = 4,
  HHV_STATUS_IO = 5,
  HHV_STATUS_DEGENERATE_WEIGHT = 6,
  HHV_STATUS_PANIC = 7,
} HhvStatus;

typedef struct HhvExpr HhvExpr;

typedef struct HhvReport HhvReport;

typedef struct HhvScenario HhvScenario;

/**
 * The rectangle `[a, b] x [c, d]`.
 */
typedef struct HhvRect {
  double a;
  double b;
  double c;
  double d;
} HhvRect;

/**
 * Outcome of a sampled check.
 */
typedef struct HhvCheckSummary {
  bool holds;
  /**
   * Smallest slack seen; negative beyond tolerance means violated.
   */
  double max_margin;
  uint64_t instances;
} HhvCheckSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses `source` into a new expression.
 *
 * # Safety
 * `source` must be a NUL-terminated string; `out` must be writable.
 */
enum HhvStatus hhv_expr_parse(const char *source, struct HhvExpr **out_expr);

/**
 * # Safety
 * `expr` must come from [`hhv_expr_parse`] and not be used afterwards.
 */
void hhv_expr_free(struct HhvExpr *expr);

/**
 * # Safety
 * `expr` must be a live handle; `out_value` must be writable.
 */
enum HhvStatus hhv_expr_eval(const struct HhvExpr *expr, double x, double y, double *out_value);

/**
 * Canonical source text of the expression.
 *
 * # Safety
 * `expr` must be a live handle; `out_text` must be writable.
 */
enum HhvStatus hhv_expr_to_string(const struct HhvExpr *expr, char **out_text);

/**
 * Mean value of `f` over the rectangle with the default quadrature.
 *
 * # Safety
 * `f` must be a live handle; `out_value` must be writable.
 */
enum HhvStatus hhv_mean2d(const struct HhvExpr *f, struct HhvRect domain, double *out_value);

/**
 * The five chain terms `f_mid, midline_mean, mean, edge_mean, corner_avg`.
 *
 * # Safety
 * `f` must be a live handle; `out_terms` must point to 5 writable doubles
 * and `out_ordered` to a writable bool.
 */
enum HhvStatus hhv_hadamard_chain(const struct HhvExpr *f,
                                  struct HhvRect domain,
                                  double *out_terms,
                                  bool *out_ordered);

/**
 * `H(t, s)` for `f` over the rectangle.
 *
 * # Safety
 * `f` must be a live handle; `out_value` must be writable.
 */
enum HhvStatus hhv_h_eval(const struct HhvExpr *f,
                          struct HhvRect domain,
                          double t,
                          double s,
                          double *out_value);

/**
 * Coordinate-wise dominance of `f` by `g` with the default sample plan
 * for `seed` and the default tolerance.
 *
 * # Safety
 * `f` and `g` must be live handles; `out_summary` must be writable.
 */
enum HhvStatus hhv_check_dominated_coordinates(const struct HhvExpr *f,
                                               const struct HhvExpr *g,
                                               struct HhvRect domain,
                                               uint64_t seed,
                                               struct HhvCheckSummary *out_summary);

/**
 * Loads a scenario file.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out_scenario` must be writable.
 */
enum HhvStatus hhv_scenario_load(const char *path, struct HhvScenario **out_scenario);

/**
 * Parses scenario text; `name` is used when the text has no `name` line.
 *
 * # Safety
 * `source` and `name` must be NUL-terminated strings; `out_scenario` must
 * be writable.
 */
enum HhvStatus hhv_scenario_parse(const char *source,
                                  const char *name,
                                  struct HhvScenario **out_scenario);

/**
 * # Safety
 * `scenario` must come from this library and not be used afterwards.
 */
void hhv_scenario_free(struct HhvScenario *scenario);

/**
 * Runs every check of the scenario.
 *
 * # Safety
 * `scenario` must be a live handle; `out_report` must be writable.
 */
enum HhvStatus hhv_scenario_run(const struct HhvScenario *scenario, struct HhvReport **out_report);

/**
 * # Safety
 * `report` must come from [`hhv_scenario_run`] and not be used afterwards.
 */
void hhv_report_free(struct HhvReport *report);

/**
 * # Safety
 * `report` must be a live handle; `out_overall` must be writable.
 */
enum HhvStatus hhv_report_overall(const struct HhvReport *report, enum HhvOverall *out_overall);

/**
 * # Safety
 * `report` must be a live handle; `out_json` must be writable.
 */
enum HhvStatus hhv_report_render_json(const struct HhvReport *report, char **out_json);

/**
 * # Safety
 * `report` must be a live handle; `out_text` must be writable.
 */
enum HhvStatus hhv_report_render_text(const struct HhvReport *report, char **out_text);

/**
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void hhv_string_free(char *s);

/**
 * Copies the calling thread's last error message into `buffer`, truncating
 * to `capacity - 1` bytes plus NUL. Returns the full message length
 * excluding the NUL, so a caller can size a second call.
 *
 * # Safety
 * `buffer` must be null or point to `capacity` writable bytes.
 */
size_t hhv_last_error_message(char *buffer, size_t capacity);

/**
 * Library version as a static NUL-terminated string.
 */
const char *hhv_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HHVERIFY_H */
