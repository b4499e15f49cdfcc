#include "minerr/minerr.h"

#include <cstring>
#include <exception>
#include <string>
#include <vector>

#include "minerr/catalog.hpp"
#include "minerr/field_io.hpp"
#include "minerr/optimizers.hpp"
#include "minerr/suites.hpp"

struct minerr_problem {
  minerr::BuiltProblem built;
  std::string label;
};

struct minerr_run {
  minerr::RunRecord record;
  std::string method;
};

struct minerr_report {
  minerr::SuiteReport report;
};

namespace {

thread_local std::string last_error;

minerr_status status_of(minerr::ErrorCode code) {
  using minerr::ErrorCode;
  switch (code) {
    case ErrorCode::InvalidArgument: return MINERR_INVALID_ARGUMENT;
    case ErrorCode::DimensionMismatch: return MINERR_DIMENSION_MISMATCH;
    case ErrorCode::NumericalOverflow: return MINERR_NUMERICAL_OVERFLOW;
    case ErrorCode::DegenerateDirection: return MINERR_DEGENERATE_DIRECTION;
    case ErrorCode::InvalidStep: return MINERR_INVALID_STEP;
    case ErrorCode::StabilityViolation: return MINERR_STABILITY_VIOLATION;
    case ErrorCode::NeedsLongerSpectrum: return MINERR_NEEDS_LONGER_SPECTRUM;
    case ErrorCode::NotAvailable: return MINERR_NOT_AVAILABLE;
    case ErrorCode::Io: return MINERR_IO;
  }
  return MINERR_INTERNAL;
}

minerr_status set_error(minerr_status s, std::string message) {
  last_error = std::move(message);
  return s;
}

// Runs body, translating exceptions into status codes.
template <class F>
minerr_status guarded(F&& body) {
  try {
    last_error.clear();
    return body();
  } catch (const minerr::Error& e) {
    return set_error(status_of(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(MINERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(MINERR_INTERNAL, e.what());
  }
}

#define MINERR_NONNULL(ptr) \
  if (!(ptr)) return set_error(MINERR_NULL_POINTER, #ptr " is null")

minerr_status copy_out(const minerr::Vector& v, double* out, size_t len) {
  MINERR_NONNULL(out);
  if (len != v.size())
    return set_error(MINERR_DIMENSION_MISMATCH, "buffer length " + std::to_string(len) +
                                                    " != dimension " + std::to_string(v.size()));
  std::memcpy(out, v.data(), len * sizeof(double));
  return MINERR_OK;
}

minerr::Vector vector_in(const minerr_problem* p, const double* q, size_t len) {
  const auto& space = p->built.pde.problem.domain();
  minerr::require(len == space->dim(), minerr::ErrorCode::DimensionMismatch,
                  "vector length " + std::to_string(len) + " != dimension " +
                      std::to_string(space->dim()));
  return minerr::Vector(space, std::vector<double>(q, q + len));
}

void fill_step(const minerr::StepDiagnostics& d, minerr_step* out) {
  out->k = d.k;
  out->functional = d.functional;
  out->grad_norm = d.grad_norm;
  out->alpha = d.alpha;
  out->sin2_phi = d.sin2_phi;
  out->step_norm = d.step_norm;
  out->has_distance = d.distance_to_solution.has_value();
  out->distance = d.distance_to_solution.value_or(0.0);
  out->distance_euclidean = d.distance_euclidean.value_or(0.0);
  out->degenerate = d.degenerate;
  out->restarted = d.restarted;
}

}  // namespace

extern "C" {

const char* minerr_version(void) { return "0.1.0"; }

const char* minerr_status_string(minerr_status status) {
  switch (status) {
    case MINERR_OK: return "ok";
    case MINERR_INVALID_ARGUMENT: return "invalid argument";
    case MINERR_DIMENSION_MISMATCH: return "dimension mismatch";
    case MINERR_NUMERICAL_OVERFLOW: return "numerical overflow";
    case MINERR_DEGENERATE_DIRECTION: return "degenerate direction";
    case MINERR_INVALID_STEP: return "invalid step";
    case MINERR_STABILITY_VIOLATION: return "stability violation";
    case MINERR_NEEDS_LONGER_SPECTRUM: return "needs longer spectrum";
    case MINERR_NOT_AVAILABLE: return "not available";
    case MINERR_IO: return "i/o error";
    case MINERR_NULL_POINTER: return "null pointer";
    case MINERR_OUT_OF_RANGE: return "out of range";
    case MINERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* minerr_last_error(void) { return last_error.c_str(); }

// ---- catalog ----------------------------------------------------------------

size_t minerr_catalog_size(void) { return minerr::problem_catalog().size(); }

minerr_status minerr_catalog_entry(size_t index, const char** selector, const char** summary,
                                   size_t* param_count) {
  const auto& cat = minerr::problem_catalog();
  if (index >= cat.size()) return set_error(MINERR_OUT_OF_RANGE, "catalog index out of range");
  if (selector) *selector = cat[index].selector.c_str();
  if (summary) *summary = cat[index].summary.c_str();
  if (param_count) *param_count = cat[index].params.size();
  return MINERR_OK;
}

minerr_status minerr_catalog_param(size_t index, size_t param, const char** key,
                                   const char** default_value, const char** meaning) {
  const auto& cat = minerr::problem_catalog();
  if (index >= cat.size() || param >= cat[index].params.size())
    return set_error(MINERR_OUT_OF_RANGE, "catalog index out of range");
  const auto& info = cat[index].params[param];
  if (key) *key = info.key.c_str();
  if (default_value) *default_value = info.default_value.c_str();
  if (meaning) *meaning = info.meaning.c_str();
  return MINERR_OK;
}

// ---- problems ---------------------------------------------------------------

minerr_status minerr_problem_create(const char* selector, const char* const* keys,
                                    const char* const* values, size_t n_params, uint64_t seed,
                                    minerr_problem** out) {
  MINERR_NONNULL(selector);
  MINERR_NONNULL(out);
  *out = nullptr;
  if (n_params > 0 && (!keys || !values))
    return set_error(MINERR_NULL_POINTER, "parameter arrays are null");
  return guarded([&] {
    minerr::ParamMap params;
    for (size_t i = 0; i < n_params; ++i) {
      if (!keys[i] || !values[i]) return set_error(MINERR_NULL_POINTER, "null parameter entry");
      params[keys[i]] = values[i];
    }
    auto built = minerr::build_problem(selector, params, seed);
    std::string label = built.pde.problem.label();
    *out = new minerr_problem{std::move(built), std::move(label)};
    return MINERR_OK;
  });
}

void minerr_problem_destroy(minerr_problem* problem) { delete problem; }

minerr_status minerr_problem_dim(const minerr_problem* p, size_t* dim) {
  MINERR_NONNULL(p);
  MINERR_NONNULL(dim);
  *dim = p->built.pde.problem.domain()->dim();
  return MINERR_OK;
}

minerr_status minerr_problem_label(const minerr_problem* p, const char** label) {
  MINERR_NONNULL(p);
  MINERR_NONNULL(label);
  *label = p->label.c_str();
  return MINERR_OK;
}

minerr_status minerr_problem_term_count(const minerr_problem* p, size_t* count) {
  MINERR_NONNULL(p);
  MINERR_NONNULL(count);
  *count = p->built.pde.problem.terms().size();
  return MINERR_OK;
}

minerr_status minerr_problem_shape(const minerr_problem* p, size_t* dims, size_t capacity,
                                   size_t* rank) {
  MINERR_NONNULL(p);
  MINERR_NONNULL(rank);
  const auto& shape = p->built.pde.shape;
  *rank = shape.size();
  if (capacity < shape.size()) return set_error(MINERR_OUT_OF_RANGE, "shape buffer too small");
  MINERR_NONNULL(dims);
  for (size_t i = 0; i < shape.size(); ++i) dims[i] = shape[i];
  return MINERR_OK;
}

minerr_status minerr_problem_spacing(const minerr_problem* p, double* h) {
  MINERR_NONNULL(p);
  MINERR_NONNULL(h);
  *h = p->built.pde.spacing;
  return MINERR_OK;
}

minerr_status minerr_problem_lipschitz(const minerr_problem* p, double* lipschitz) {
  MINERR_NONNULL(p);
  MINERR_NONNULL(lipschitz);
  return guarded([&] {
    *lipschitz = minerr::lipschitz_constant(p->built.pde.problem);
    return MINERR_OK;
  });
}

minerr_status minerr_problem_start(const minerr_problem* p, double* out, size_t len) {
  MINERR_NONNULL(p);
  return copy_out(p->built.pde.start, out, len);
}

minerr_status minerr_problem_exact(const minerr_problem* p, double* out, size_t len) {
  MINERR_NONNULL(p);
  const auto& exact = p->built.pde.problem.exact_solution();
  if (!exact) return set_error(MINERR_NOT_AVAILABLE, "problem has no exact solution");
  return copy_out(*exact, out, len);
}

minerr_status minerr_problem_weights(const minerr_problem* p, double* out, size_t len) {
  MINERR_NONNULL(p);
  MINERR_NONNULL(out);
  const auto w = p->built.pde.problem.domain()->weights();
  if (len != w.size()) return set_error(MINERR_DIMENSION_MISMATCH, "buffer length mismatch");
  std::memcpy(out, w.data(), len * sizeof(double));
  return MINERR_OK;
}

minerr_status minerr_problem_evaluate(const minerr_problem* p, const double* q, size_t len,
                                      double* functional, double* gradient) {
  MINERR_NONNULL(p);
  MINERR_NONNULL(q);
  MINERR_NONNULL(functional);
  return guarded([&] {
    const auto ev = p->built.pde.problem.evaluate(vector_in(p, q, len));
    *functional = ev.functional;
    if (gradient) std::memcpy(gradient, ev.gradient.data(), len * sizeof(double));
    return MINERR_OK;
  });
}

minerr_status minerr_problem_adjoint_defect(const minerr_problem* p, size_t term, int trials,
                                            uint64_t seed, double* defect) {
  MINERR_NONNULL(p);
  MINERR_NONNULL(defect);
  const auto terms = p->built.pde.problem.terms();
  if (term >= terms.size()) return set_error(MINERR_OUT_OF_RANGE, "term index out of range");
  return guarded([&] {
    *defect = minerr::verify_adjoint(terms[term].op, trials, 0.0, seed).max_defect;
    return MINERR_OK;
  });
}

minerr_status minerr_problem_note_count(const minerr_problem* p, size_t* count) {
  MINERR_NONNULL(p);
  MINERR_NONNULL(count);
  *count = p->built.notes.size();
  return MINERR_OK;
}

minerr_status minerr_problem_note(const minerr_problem* p, size_t index, const char** note) {
  MINERR_NONNULL(p);
  MINERR_NONNULL(note);
  if (index >= p->built.notes.size()) return set_error(MINERR_OUT_OF_RANGE, "note index");
  *note = p->built.notes[index].c_str();
  return MINERR_OK;
}

minerr_status minerr_problem_certificate(const minerr_problem* p, minerr_certificate* out) {
  MINERR_NONNULL(p);
  MINERR_NONNULL(out);
  const auto& c = p->built.certificate;
  if (!c) return set_error(MINERR_NOT_AVAILABLE, "problem carries no certificate");
  *out = minerr_certificate{c->steps,           c->epsilon,          c->tail_mode,
                            c->xi_norm,         c->psi_min,          c->psi_gradient_norm,
                            c->psi_at_head_zero, c->head_threshold, c->gap_threshold,
                            c->evaluations};
  return MINERR_OK;
}

minerr_status minerr_problem_certificate_eta(const minerr_problem* p, double* out, size_t len) {
  MINERR_NONNULL(p);
  MINERR_NONNULL(out);
  const auto& c = p->built.certificate;
  if (!c) return set_error(MINERR_NOT_AVAILABLE, "problem carries no certificate");
  if (len != c->eta_hat.size()) return set_error(MINERR_DIMENSION_MISMATCH, "eta length is N");
  std::memcpy(out, c->eta_hat.data(), len * sizeof(double));
  return MINERR_OK;
}

// ---- methods and runs -------------------------------------------------------

size_t minerr_method_count(void) { return minerr::known_method_names().size(); }

const char* minerr_method_name(size_t index) {
  static const std::vector<std::string> names = minerr::known_method_names();
  return index < names.size() ? names[index].c_str() : nullptr;
}

minerr_status minerr_method_check(const char* name) {
  MINERR_NONNULL(name);
  if (!minerr::parse_method(name))
    return set_error(MINERR_INVALID_ARGUMENT, std::string("unknown method '") + name + "'");
  return MINERR_OK;
}

void minerr_run_options_default(minerr_run_options* options) {
  if (!options) return;
  *options = minerr_run_options{100, 1e-12, 0, 0.0, 0, 0.0, 0};
}

minerr_status minerr_run_create(const minerr_problem* p, const char* method, const double* q0,
                                size_t len, const minerr_run_options* options,
                                minerr_run** out) {
  MINERR_NONNULL(p);
  MINERR_NONNULL(method);
  MINERR_NONNULL(out);
  *out = nullptr;
  return guarded([&] {
    auto config = minerr::parse_method(method);
    if (!config)
      return set_error(MINERR_INVALID_ARGUMENT, std::string("unknown method '") + method + "'");
    minerr_run_options opts;
    minerr_run_options_default(&opts);
    if (options) opts = *options;
    config->max_iterations = opts.max_iterations;
    config->degeneracy_tolerance = opts.degeneracy_tolerance;
    if (opts.has_target_functional) config->target_functional = opts.target_functional;
    if (opts.has_target_distance) config->target_distance = opts.target_distance;
    if (opts.history_cap > 0) config->history_cap = opts.history_cap;
    const minerr::Vector start = q0 ? vector_in(p, q0, len) : p->built.pde.start;
    auto record = minerr::run(p->built.pde.problem, start, *config);
    std::string name = minerr::method_name(record.config);
    *out = new minerr_run{std::move(record), std::move(name)};
    return MINERR_OK;
  });
}

void minerr_run_destroy(minerr_run* run) { delete run; }

minerr_status minerr_run_method(const minerr_run* run, const char** name) {
  MINERR_NONNULL(run);
  MINERR_NONNULL(name);
  *name = run->method.c_str();
  return MINERR_OK;
}

minerr_status minerr_run_step_count(const minerr_run* run, size_t* count) {
  MINERR_NONNULL(run);
  MINERR_NONNULL(count);
  *count = run->record.per_step.size();
  return MINERR_OK;
}

minerr_status minerr_run_step(const minerr_run* run, size_t index, minerr_step* out) {
  MINERR_NONNULL(run);
  MINERR_NONNULL(out);
  if (index >= run->record.per_step.size())
    return set_error(MINERR_OUT_OF_RANGE, "step index out of range");
  fill_step(run->record.per_step[index], out);
  return MINERR_OK;
}

minerr_status minerr_run_final(const minerr_run* run, minerr_step* out) {
  MINERR_NONNULL(run);
  MINERR_NONNULL(out);
  fill_step(run->record.final_state, out);
  return MINERR_OK;
}

minerr_status minerr_run_final_q(const minerr_run* run, double* out, size_t len) {
  MINERR_NONNULL(run);
  return copy_out(run->record.final_q, out, len);
}

minerr_status minerr_run_stop_reason(const minerr_run* run, minerr_stop_reason* out) {
  MINERR_NONNULL(run);
  MINERR_NONNULL(out);
  switch (run->record.stop_reason) {
    case minerr::StopReason::Budget: *out = MINERR_STOP_BUDGET; break;
    case minerr::StopReason::Degenerate: *out = MINERR_STOP_DEGENERATE; break;
    case minerr::StopReason::TargetReached: *out = MINERR_STOP_TARGET_REACHED; break;
    case minerr::StopReason::NumericalFailure: *out = MINERR_STOP_NUMERICAL_FAILURE; break;
  }
  return MINERR_OK;
}

const char* minerr_stop_reason_string(minerr_stop_reason reason) {
  switch (reason) {
    case MINERR_STOP_BUDGET: return "budget";
    case MINERR_STOP_DEGENERATE: return "degenerate";
    case MINERR_STOP_TARGET_REACHED: return "target_reached";
    case MINERR_STOP_NUMERICAL_FAILURE: return "numerical_failure";
  }
  return "unknown";
}

minerr_status minerr_run_failure(const minerr_run* run, int* iteration, const char** message) {
  MINERR_NONNULL(run);
  if (!run->record.failure_iteration)
    return set_error(MINERR_NOT_AVAILABLE, "run did not fail");
  if (iteration) *iteration = *run->record.failure_iteration;
  if (message) *message = run->record.failure_message.c_str();
  return MINERR_OK;
}

minerr_status minerr_run_wall_seconds(const minerr_run* run, double* seconds) {
  MINERR_NONNULL(run);
  MINERR_NONNULL(seconds);
  *seconds = run->record.wall_time.count();
  return MINERR_OK;
}

// ---- suites -----------------------------------------------------------------

size_t minerr_suite_count(void) { return minerr::suite_names().size(); }

const char* minerr_suite_name(size_t index) {
  const auto& names = minerr::suite_names();
  return index < names.size() ? names[index].c_str() : nullptr;
}

minerr_status minerr_suite_run(const char* name, uint64_t seed, minerr_report** out) {
  MINERR_NONNULL(name);
  MINERR_NONNULL(out);
  *out = nullptr;
  return guarded([&] {
    *out = new minerr_report{minerr::run_suite(name, seed)};
    return MINERR_OK;
  });
}

void minerr_report_destroy(minerr_report* report) { delete report; }

minerr_status minerr_report_check_count(const minerr_report* r, size_t* count) {
  MINERR_NONNULL(r);
  MINERR_NONNULL(count);
  *count = r->report.checks.size();
  return MINERR_OK;
}

minerr_status minerr_report_check(const minerr_report* r, size_t index, minerr_check* out) {
  MINERR_NONNULL(r);
  MINERR_NONNULL(out);
  if (index >= r->report.checks.size()) return set_error(MINERR_OUT_OF_RANGE, "check index");
  const auto& c = r->report.checks[index];
  *out = minerr_check{c.problem.c_str(), c.name.c_str(), c.measured, c.threshold, c.passed,
                      c.detail.c_str()};
  return MINERR_OK;
}

minerr_status minerr_report_passed(const minerr_report* r, int* passed) {
  MINERR_NONNULL(r);
  MINERR_NONNULL(passed);
  *passed = r->report.passed();
  return MINERR_OK;
}

// ---- field files ------------------------------------------------------------

minerr_status minerr_write_field(const char* path, const double* values, size_t len,
                                 const size_t* dims, size_t rank, double spacing,
                                 const char* label) {
  MINERR_NONNULL(path);
  MINERR_NONNULL(values);
  MINERR_NONNULL(dims);
  return guarded([&] {
    minerr::write_field(path, {values, len}, std::vector<std::size_t>(dims, dims + rank), spacing,
                        label ? label : "");
    return MINERR_OK;
  });
}

minerr_status minerr_write_field_csv(const char* path, const double* values, size_t len,
                                     const size_t* dims, size_t rank) {
  MINERR_NONNULL(path);
  MINERR_NONNULL(values);
  MINERR_NONNULL(dims);
  return guarded([&] {
    std::vector<std::size_t> shape(dims, dims + rank);
    if (rank == 3) {
      const auto slice = minerr::slice_first_axis({values, len}, shape, shape[0] / 2);
      minerr::write_field_csv(path, slice, {shape[1], shape[2]});
    } else {
      minerr::write_field_csv(path, {values, len}, shape);
    }
    return MINERR_OK;
  });
}

}  // extern "C"
