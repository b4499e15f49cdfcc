/* C interface to the minimal-error optimization library.
 *
 * Every object is an opaque handle created by a *_create function and released
 * by the matching *_destroy. Functions return a minerr_status; on failure a
 * description is available from minerr_last_error() (per thread). Strings
 * returned through `const char**` stay valid for the lifetime of the handle
 * they came from; static strings live forever. */
#ifndef MINERR_H
#define MINERR_H

#include <stddef.h>
#include <stdint.h>

#if defined(MINERR_BUILDING_LIBRARY)
#define MINERR_API __attribute__((visibility("default")))
#else
#define MINERR_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum minerr_status {
  MINERR_OK = 0,
  MINERR_INVALID_ARGUMENT = 1,
  MINERR_DIMENSION_MISMATCH = 2,
  MINERR_NUMERICAL_OVERFLOW = 3,
  MINERR_DEGENERATE_DIRECTION = 4,
  MINERR_INVALID_STEP = 5,
  MINERR_STABILITY_VIOLATION = 6,
  MINERR_NEEDS_LONGER_SPECTRUM = 7,
  MINERR_NOT_AVAILABLE = 8,
  MINERR_IO = 9,
  MINERR_NULL_POINTER = 10,
  MINERR_OUT_OF_RANGE = 11,
  MINERR_INTERNAL = 12
} minerr_status;

typedef enum minerr_stop_reason {
  MINERR_STOP_BUDGET = 0,
  MINERR_STOP_DEGENERATE = 1,
  MINERR_STOP_TARGET_REACHED = 2,
  MINERR_STOP_NUMERICAL_FAILURE = 3
} minerr_stop_reason;

typedef struct minerr_problem minerr_problem;
typedef struct minerr_run minerr_run;
typedef struct minerr_report minerr_report;

MINERR_API const char* minerr_version(void);
MINERR_API const char* minerr_status_string(minerr_status status);
/* Message of the last failed call on this thread ("" if none). */
MINERR_API const char* minerr_last_error(void);

/* ---- problem catalog ---------------------------------------------------- */

MINERR_API size_t minerr_catalog_size(void);
MINERR_API minerr_status minerr_catalog_entry(size_t index, const char** selector,
                                              const char** summary, size_t* param_count);
MINERR_API minerr_status minerr_catalog_param(size_t index, size_t param, const char** key,
                                              const char** default_value, const char** meaning);

/* ---- problems ------------------------------------------------------------ */

/* keys[i] = values[i] parameters as listed by the catalog. */
MINERR_API minerr_status minerr_problem_create(const char* selector, const char* const* keys,
                                               const char* const* values, size_t n_params,
                                               uint64_t seed, minerr_problem** out);
MINERR_API void minerr_problem_destroy(minerr_problem* problem);

MINERR_API minerr_status minerr_problem_dim(const minerr_problem* p, size_t* dim);
MINERR_API minerr_status minerr_problem_label(const minerr_problem* p, const char** label);
MINERR_API minerr_status minerr_problem_term_count(const minerr_problem* p, size_t* count);
/* Grid shape of the unknown; *rank receives the number of axes even when
 * `capacity` is too small (then MINERR_OUT_OF_RANGE is returned). */
MINERR_API minerr_status minerr_problem_shape(const minerr_problem* p, size_t* dims,
                                              size_t capacity, size_t* rank);
MINERR_API minerr_status minerr_problem_spacing(const minerr_problem* p, double* h);
MINERR_API minerr_status minerr_problem_lipschitz(const minerr_problem* p, double* lipschitz);
MINERR_API minerr_status minerr_problem_start(const minerr_problem* p, double* out, size_t len);
/* MINERR_NOT_AVAILABLE when the problem has no known solution. */
MINERR_API minerr_status minerr_problem_exact(const minerr_problem* p, double* out, size_t len);
MINERR_API minerr_status minerr_problem_weights(const minerr_problem* p, double* out, size_t len);
/* J(q) and, when `gradient` is non-null, grad J(q) (length len). */
MINERR_API minerr_status minerr_problem_evaluate(const minerr_problem* p, const double* q,
                                                 size_t len, double* functional,
                                                 double* gradient);
/* Largest relative defect of <A0 q, p> - <q, A* p> over `trials` random probes. */
MINERR_API minerr_status minerr_problem_adjoint_defect(const minerr_problem* p, size_t term,
                                                       int trials, uint64_t seed, double* defect);
MINERR_API minerr_status minerr_problem_note_count(const minerr_problem* p, size_t* count);
MINERR_API minerr_status minerr_problem_note(const minerr_problem* p, size_t index,
                                             const char** note);

typedef struct minerr_certificate {
  size_t steps;      /* N */
  double epsilon;
  size_t tail_mode;  /* M, 1-based */
  double xi_norm;
  double psi_min;
  double psi_gradient_norm;
  double psi_at_head_zero;
  double head_threshold;
  double gap_threshold;
  size_t evaluations;
} minerr_certificate;

/* Only problems built with the "adversarial" selector carry a certificate. */
MINERR_API minerr_status minerr_problem_certificate(const minerr_problem* p,
                                                    minerr_certificate* out);
/* The minimizer eta_hat (length `steps`). */
MINERR_API minerr_status minerr_problem_certificate_eta(const minerr_problem* p, double* out,
                                                        size_t len);

/* ---- methods and runs --------------------------------------------------- */

MINERR_API size_t minerr_method_count(void);
MINERR_API const char* minerr_method_name(size_t index);
MINERR_API minerr_status minerr_method_check(const char* name);

typedef struct minerr_run_options {
  int max_iterations;           /* default 100 */
  double degeneracy_tolerance;  /* default 1e-12 */
  int has_target_functional;
  double target_functional;
  int has_target_distance;
  double target_distance;
  size_t history_cap;           /* 0 = unbounded (infinite-moment method only) */
} minerr_run_options;

MINERR_API void minerr_run_options_default(minerr_run_options* options);

/* q0 == NULL starts from the problem's default start. */
MINERR_API minerr_status minerr_run_create(const minerr_problem* p, const char* method,
                                           const double* q0, size_t len,
                                           const minerr_run_options* options, minerr_run** out);
MINERR_API void minerr_run_destroy(minerr_run* run);

typedef struct minerr_step {
  int k;
  double functional;
  double grad_norm;
  double alpha;
  double sin2_phi;
  double step_norm;
  int has_distance;
  double distance;            /* weighted norm of q_k - q* */
  double distance_euclidean;  /* plain norm of the grid values */
  int degenerate;
  int restarted;
} minerr_step;

MINERR_API minerr_status minerr_run_method(const minerr_run* run, const char** name);
MINERR_API minerr_status minerr_run_step_count(const minerr_run* run, size_t* count);
MINERR_API minerr_status minerr_run_step(const minerr_run* run, size_t index, minerr_step* out);
/* State at the final iterate: k = steps taken, step fields zero. */
MINERR_API minerr_status minerr_run_final(const minerr_run* run, minerr_step* out);
MINERR_API minerr_status minerr_run_final_q(const minerr_run* run, double* out, size_t len);
MINERR_API minerr_status minerr_run_stop_reason(const minerr_run* run, minerr_stop_reason* out);
MINERR_API const char* minerr_stop_reason_string(minerr_stop_reason reason);
/* Iteration and message of a numerical failure; NOT_AVAILABLE otherwise. */
MINERR_API minerr_status minerr_run_failure(const minerr_run* run, int* iteration,
                                            const char** message);
MINERR_API minerr_status minerr_run_wall_seconds(const minerr_run* run, double* seconds);

/* ---- verification suites ------------------------------------------------ */

MINERR_API size_t minerr_suite_count(void);
MINERR_API const char* minerr_suite_name(size_t index);
MINERR_API minerr_status minerr_suite_run(const char* name, uint64_t seed, minerr_report** out);
MINERR_API void minerr_report_destroy(minerr_report* report);

typedef struct minerr_check {
  const char* problem;
  const char* name;
  double measured;
  double threshold;
  int passed;
  const char* detail;
} minerr_check;

MINERR_API minerr_status minerr_report_check_count(const minerr_report* r, size_t* count);
MINERR_API minerr_status minerr_report_check(const minerr_report* r, size_t index,
                                             minerr_check* out);
MINERR_API minerr_status minerr_report_passed(const minerr_report* r, int* passed);

/* ---- field files --------------------------------------------------------- */

/* Raw little-endian float64 at `path` plus a shape sidecar at `path`.txt. */
MINERR_API minerr_status minerr_write_field(const char* path, const double* values, size_t len,
                                            const size_t* dims, size_t rank, double spacing,
                                            const char* label);
/* CSV of a 1-D or 2-D field, or of the middle first-axis slice of a 3-D one. */
MINERR_API minerr_status minerr_write_field_csv(const char* path, const double* values,
                                                size_t len, const size_t* dims, size_t rank);

#ifdef __cplusplus
}
#endif

#endif /* MINERR_H */
