#include "minerr/optimizers.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

namespace minerr {

MethodConfig MethodConfig::minimal_error(int iterations) {
  return of(MethodKind::MinimalError, iterations);
}

MethodConfig MethodConfig::mme(std::size_t m, int iterations) {
  MethodConfig c;
  c.kind = MethodKind::MomentMinimalError;
  c.moments = m;
  c.max_iterations = iterations;
  return c;
}

MethodConfig MethodConfig::of(MethodKind kind, int iterations) {
  MethodConfig c;
  c.kind = kind;
  c.max_iterations = iterations;
  return c;
}

void MethodConfig::validate() const {
  require(max_iterations >= 1, ErrorCode::InvalidArgument, "max_iterations must be >= 1");
  require(degeneracy_tolerance > 0.0 && degeneracy_tolerance < 1.0, ErrorCode::InvalidArgument,
          "degeneracy_tolerance must lie in (0, 1)");
  if (kind == MethodKind::MomentMinimalError)
    require(moments >= 1, ErrorCode::InvalidArgument, "m-moment method needs m >= 1");
  if (fixed_step)
    require(*fixed_step > 0.0, ErrorCode::InvalidArgument, "fixed step must be positive");
  if (history_cap)
    require(*history_cap >= 1, ErrorCode::InvalidArgument, "history cap must be >= 1");
}

std::string method_name(const MethodConfig& c) {
  switch (c.kind) {
    case MethodKind::MinimalError: return "minimal_error";
    case MethodKind::MomentMinimalError:
      return c.moments == kInfiniteMoments ? std::string("mme_inf")
                                           : "mme" + std::to_string(c.moments);
    case MethodKind::Polyak: return "polyak";
    case MethodKind::GradientDescentFixed: {
      if (!c.fixed_step) return "gd";
      std::ostringstream s;
      s << "gd:" << *c.fixed_step;
      return s.str();
    }
    case MethodKind::HeavyBallAdaptive: return "heavy_ball";
    case MethodKind::ConjugateGradientFR: return "cg_fr";
    case MethodKind::ConjugateGradientPR: return "cg_pr";
    case MethodKind::ConjugateGradientOrtho: return "cg_ortho";
    case MethodKind::SimilarTriangles: return "stm";
  }
  return "unknown";
}

std::vector<std::string> known_method_names() {
  return {"minimal_error", "mme<m>", "mme:<m>", "mme_inf", "polyak",  "gd",
          "gd:<step>",     "heavy_ball", "cg_fr", "cg_pr",   "cg_ortho", "stm"};
}

namespace {

template <class T>
std::optional<T> parse_number(std::string_view text) {
  T value{};
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) return std::nullopt;
  return value;
}

}  // namespace

std::optional<MethodConfig> parse_method(std::string_view name) {
  if (name == "minimal_error" || name == "me" || name == "mme0")
    return MethodConfig::of(MethodKind::MinimalError);
  if (name == "mme_inf" || name == "mme:inf") return MethodConfig::mme(kInfiniteMoments);
  if (name == "polyak") return MethodConfig::of(MethodKind::Polyak);
  if (name == "gd") return MethodConfig::of(MethodKind::GradientDescentFixed);
  if (name == "heavy_ball") return MethodConfig::of(MethodKind::HeavyBallAdaptive);
  if (name == "cg_fr") return MethodConfig::of(MethodKind::ConjugateGradientFR);
  if (name == "cg_pr") return MethodConfig::of(MethodKind::ConjugateGradientPR);
  if (name == "cg_ortho") return MethodConfig::of(MethodKind::ConjugateGradientOrtho);
  if (name == "stm") return MethodConfig::of(MethodKind::SimilarTriangles);
  if (name.starts_with("gd:")) {
    auto step = parse_number<double>(name.substr(3));
    if (!step || !(*step > 0.0)) return std::nullopt;
    auto c = MethodConfig::of(MethodKind::GradientDescentFixed);
    c.fixed_step = *step;
    return c;
  }
  if (name.starts_with("mme")) {
    std::string_view rest = name.substr(3);
    if (rest.starts_with(":")) rest.remove_prefix(1);
    auto m = parse_number<std::size_t>(rest);
    if (!m) return std::nullopt;
    if (*m == 0) return MethodConfig::of(MethodKind::MinimalError);
    return MethodConfig::mme(*m);
  }
  return std::nullopt;
}

const char* to_string(StopReason reason) {
  switch (reason) {
    case StopReason::Budget: return "budget";
    case StopReason::Degenerate: return "degenerate";
    case StopReason::TargetReached: return "target_reached";
    case StopReason::NumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------

namespace {

StepDiagnostics base_diagnostics(const Evaluation& ev) {
  StepDiagnostics d;
  d.functional = ev.functional;
  d.grad_norm = norm(ev.gradient);
  return d;
}

StepResult no_step(const Vector& q, StepDiagnostics d, StepOutcome outcome) {
  d.alpha = 0.0;
  d.step_norm = 0.0;
  d.degenerate = outcome == StepOutcome::Degenerate;
  return StepResult{q, d, outcome};
}

// q_next = q + alpha s; the displacement norm is alpha * ||s||.
StepResult take_step(const Vector& q, const Vector& s, double alpha, double s_norm,
                     StepDiagnostics d) {
  Vector next = q;
  next.axpy(alpha, s);
  d.alpha = alpha;
  d.step_norm = std::abs(alpha) * s_norm;
  return StepResult{std::move(next), d, StepOutcome::Advanced};
}

// Polyak (factor 1) and minimal-error (factor 2) gradient steps.
StepResult gradient_step_with_target(const Vector& q, const Evaluation& ev, double factor) {
  StepDiagnostics d = base_diagnostics(ev);
  if (ev.functional == 0.0) return no_step(q, d, StepOutcome::TargetReached);
  const double g2 = norm_squared(ev.gradient);
  if (g2 == 0.0) return no_step(q, d, StepOutcome::NumericalFailure);
  Vector s = -1.0 * ev.gradient;
  return take_step(q, s, factor * ev.functional / g2, std::sqrt(g2), d);
}

}  // namespace

StepResult step_polyak(const QuadraticProblem& problem, const Vector& q) {
  return gradient_step_with_target(q, problem.evaluate(q), 1.0);
}

StepResult step_minimal_error(const QuadraticProblem& problem, const Vector& q) {
  return gradient_step_with_target(q, problem.evaluate(q), 2.0);
}

StepResult step_mme(const QuadraticProblem& problem, IterateState& state, std::size_t m,
                    double degeneracy_tolerance, std::optional<std::size_t> history_cap) {
  return step_mme(problem, state, problem.evaluate(state.q), m, degeneracy_tolerance,
                  history_cap);
}

StepResult step_mme(const QuadraticProblem& /*problem*/, IterateState& state,
                    const Evaluation& ev, std::size_t m, double degeneracy_tolerance,
                    std::optional<std::size_t> history_cap) {
  StepDiagnostics d = base_diagnostics(ev);
  d.k = state.k;
  if (ev.functional == 0.0) return no_step(state.q, d, StepOutcome::TargetReached);
  const double g2 = norm_squared(ev.gradient);
  if (g2 == 0.0) return no_step(state.q, d, StepOutcome::NumericalFailure);

  // s_k = -grad + sum_i <grad, h_{k-i}> / ||h_{k-i}||^2 h_{k-i}: the antigradient
  // with its projection on the retained (mutually orthogonal) steps removed.
  Vector s = -1.0 * ev.gradient;
  for (const HistoryEntry& e : state.history) s.axpy(inner(ev.gradient, e.h) / e.norm2, e.h);
  const double s2 = norm_squared(s);
  d.sin2_phi = s2 / g2;
  if (!(d.sin2_phi >= degeneracy_tolerance)) return no_step(state.q, d, StepOutcome::Degenerate);

  const double alpha = 2.0 * ev.functional / s2;
  StepResult r = take_step(state.q, s, alpha, std::sqrt(s2), d);

  std::size_t keep = m;
  if (m == kInfiniteMoments && history_cap) keep = *history_cap;
  if (keep > 0) {
    Vector h = alpha * s;
    const double h2 = norm_squared(h);
    if (h2 > 0.0) state.history.push_back(HistoryEntry{std::move(h), h2});
    while (state.history.size() > keep) state.history.pop_front();
  }
  state.last_direction = std::move(s);
  state.q = r.q_next;
  ++state.k;
  return r;
}

double exact_line_search_alpha(const QuadraticProblem& problem, const Vector& grad,
                               const Vector& s, double curvature) {
  (void)problem;
  if (!(curvature > 0.0))
    fail(ErrorCode::DegenerateDirection, "search direction lies in the operator kernel");
  return -inner(grad, s) / curvature;
}

double exact_line_search_alpha(const QuadraticProblem& problem, const Vector& q, const Vector& s) {
  require(norm_squared(s) > 0.0, ErrorCode::InvalidArgument, "line search along a zero direction");
  return exact_line_search_alpha(problem, problem.gradient(q), s, problem.curvature(s));
}

// ---------------------------------------------------------------------------

namespace {

class MinimalErrorFamily final : public Stepper {
 public:
  MinimalErrorFamily(const QuadraticProblem& problem, const MethodConfig& c)
      : problem_(problem), config_(c), state_(Vector(problem.domain())) {}

  StepResult advance(const Vector& q, const Evaluation& ev) override {
    state_.q = q;
    const std::size_t m = config_.kind == MethodKind::MinimalError ? 0 : config_.moments;
    return step_mme(problem_, state_, ev, m, config_.degeneracy_tolerance, config_.history_cap);
  }

 private:
  const QuadraticProblem& problem_;
  MethodConfig config_;
  IterateState state_;
};

class PolyakStepper final : public Stepper {
 public:
  StepResult advance(const Vector& q, const Evaluation& ev) override {
    return gradient_step_with_target(q, ev, 1.0);
  }
};

// Baselines report a zero gradient as having reached the minimizer.
bool zero_gradient(const Evaluation& ev, StepDiagnostics& d) {
  return ev.functional == 0.0 || d.grad_norm == 0.0;
}

class FixedStepDescent final : public Stepper {
 public:
  explicit FixedStepDescent(double step) : step_(step) {}
  StepResult advance(const Vector& q, const Evaluation& ev) override {
    StepDiagnostics d = base_diagnostics(ev);
    if (zero_gradient(ev, d)) return no_step(q, d, StepOutcome::TargetReached);
    return take_step(q, -1.0 * ev.gradient, step_, d.grad_norm, d);
  }

 private:
  double step_;
};

enum class CgFlavor { FletcherReeves, PolakRibiere, Orthogonal };

class ConjugateGradient final : public Stepper {
 public:
  ConjugateGradient(const QuadraticProblem& problem, CgFlavor flavor)
      : problem_(problem), flavor_(flavor) {}

  StepResult advance(const Vector& q, const Evaluation& ev) override {
    StepDiagnostics d = base_diagnostics(ev);
    if (zero_gradient(ev, d)) return no_step(q, d, StepOutcome::TargetReached);
    const double g2 = d.grad_norm * d.grad_norm;
    Vector s = -1.0 * ev.gradient;
    if (prev_dir_) {
      double beta = 0.0;
      switch (flavor_) {
        case CgFlavor::FletcherReeves: beta = g2 / prev_g2_; break;
        case CgFlavor::PolakRibiere:
          beta = (g2 - inner(ev.gradient, *prev_grad_)) / prev_g2_;
          if (beta < 0.0) {
            beta = 0.0;
            d.restarted = true;
          }
          break;
        case CgFlavor::Orthogonal:
          beta = inner(ev.gradient, *prev_dir_) / norm_squared(*prev_dir_);
          break;
      }
      s.axpy(beta, *prev_dir_);
    }
    const double s2 = norm_squared(s);
    if (flavor_ == CgFlavor::Orthogonal) d.sin2_phi = s2 / g2;
    const double curvature = problem_.curvature(s);
    if (!(curvature > 0.0) || s2 == 0.0) return no_step(q, d, StepOutcome::Degenerate);
    const double alpha = exact_line_search_alpha(problem_, ev.gradient, s, curvature);
    StepResult r = take_step(q, s, alpha, std::sqrt(s2), d);
    prev_g2_ = g2;
    prev_grad_ = ev.gradient;
    prev_dir_ = std::move(s);
    return r;
  }

 private:
  const QuadraticProblem& problem_;
  CgFlavor flavor_;
  std::optional<Vector> prev_dir_;
  std::optional<Vector> prev_grad_;
  double prev_g2_ = 0.0;
};

// Two-parameter heavy ball q+ = q - a grad + b (q - q_prev) with
// a = 4 / (sqrt L + sqrt mu)^2, b = ((sqrt L - sqrt mu) / (sqrt L + sqrt mu))^2.
// L is the problem's Lipschitz constant; mu is the smallest curvature
// <dg, dq> / ||dq||^2 observed along the steps taken so far.
class HeavyBallAdaptive final : public Stepper {
 public:
  explicit HeavyBallAdaptive(double lipschitz) : lipschitz_(lipschitz) {}

  StepResult advance(const Vector& q, const Evaluation& ev) override {
    StepDiagnostics d = base_diagnostics(ev);
    if (zero_gradient(ev, d)) return no_step(q, d, StepOutcome::TargetReached);
    if (!(lipschitz_ > 0.0)) return no_step(q, d, StepOutcome::NumericalFailure);
    if (!prev_step_) {
      StepResult r = take_step(q, -1.0 * ev.gradient, 1.0 / lipschitz_, d.grad_norm, d);
      remember(r, q, ev);
      return r;
    }
    const double h2 = norm_squared(*prev_step_);
    if (h2 > 0.0) {
      const double curvature = inner(ev.gradient - *prev_grad_, *prev_step_) / h2;
      mu_ = std::clamp(std::min(mu_, curvature), 0.0, lipschitz_);
    }
    const double sl = std::sqrt(lipschitz_), sm = std::sqrt(mu_);
    const double a = 4.0 / ((sl + sm) * (sl + sm));
    const double b = ((sl - sm) / (sl + sm)) * ((sl - sm) / (sl + sm));
    Vector next = q;
    next.axpy(-a, ev.gradient);
    next.axpy(b, *prev_step_);
    d.alpha = a;
    StepResult r{std::move(next), d, StepOutcome::Advanced};
    r.diag.step_norm = norm(r.q_next - q);
    remember(r, q, ev);
    return r;
  }

 private:
  void remember(const StepResult& r, const Vector& q, const Evaluation& ev) {
    prev_step_ = r.q_next - q;
    prev_grad_ = ev.gradient;
  }

  double lipschitz_;
  double mu_ = std::numeric_limits<double>::infinity();
  std::optional<Vector> prev_step_;
  std::optional<Vector> prev_grad_;
};

// Similar-triangles accelerated method with step 1/L:
//   a_{k+1}: L a^2 = A_k + a,  A_{k+1} = A_k + a_{k+1}
//   y = (A_k x + a u) / A_{k+1};  u -= a grad J(y);  x = (A_k x + a u) / A_{k+1}
class SimilarTriangles final : public Stepper {
 public:
  SimilarTriangles(const QuadraticProblem& problem, double lipschitz)
      : problem_(problem), lipschitz_(lipschitz) {}

  StepResult advance(const Vector& q, const Evaluation& ev) override {
    StepDiagnostics d = base_diagnostics(ev);
    if (zero_gradient(ev, d)) return no_step(q, d, StepOutcome::TargetReached);
    if (!(lipschitz_ > 0.0)) return no_step(q, d, StepOutcome::NumericalFailure);
    if (!u_) u_ = q;
    const double a = (1.0 + std::sqrt(1.0 + 4.0 * lipschitz_ * big_a_)) / (2.0 * lipschitz_);
    const double next_a = big_a_ + a;
    Vector y = (big_a_ / next_a) * q;
    y.axpy(a / next_a, *u_);
    u_->axpy(-a, problem_.gradient(y));
    Vector x = (big_a_ / next_a) * q;
    x.axpy(a / next_a, *u_);
    big_a_ = next_a;
    d.alpha = a;
    d.step_norm = norm(x - q);
    return StepResult{std::move(x), d, StepOutcome::Advanced};
  }

 private:
  const QuadraticProblem& problem_;
  double lipschitz_;
  double big_a_ = 0.0;
  std::optional<Vector> u_;
};

}  // namespace

std::unique_ptr<Stepper> make_stepper(const QuadraticProblem& problem, const MethodConfig& c) {
  c.validate();
  switch (c.kind) {
    case MethodKind::MinimalError:
    case MethodKind::MomentMinimalError:
      return std::make_unique<MinimalErrorFamily>(problem, c);
    case MethodKind::Polyak: return std::make_unique<PolyakStepper>();
    case MethodKind::GradientDescentFixed:
      return std::make_unique<FixedStepDescent>(
          c.fixed_step ? *c.fixed_step : 1.0 / lipschitz_constant(problem));
    case MethodKind::HeavyBallAdaptive:
      return std::make_unique<HeavyBallAdaptive>(lipschitz_constant(problem));
    case MethodKind::ConjugateGradientFR:
      return std::make_unique<ConjugateGradient>(problem, CgFlavor::FletcherReeves);
    case MethodKind::ConjugateGradientPR:
      return std::make_unique<ConjugateGradient>(problem, CgFlavor::PolakRibiere);
    case MethodKind::ConjugateGradientOrtho:
      return std::make_unique<ConjugateGradient>(problem, CgFlavor::Orthogonal);
    case MethodKind::SimilarTriangles:
      return std::make_unique<SimilarTriangles>(problem, lipschitz_constant(problem));
  }
  fail(ErrorCode::InvalidArgument, "unknown method kind");
}

// ---------------------------------------------------------------------------

namespace {

void attach_distances(const QuadraticProblem& problem, const Vector& q, StepDiagnostics& d) {
  if (!problem.exact_solution()) return;
  const Vector e = q - *problem.exact_solution();
  d.distance_to_solution = norm(e);
  d.distance_euclidean = euclidean_norm(e);
}

bool target_met(const MethodConfig& c, const StepDiagnostics& d) {
  if (d.functional == 0.0) return true;
  if (c.target_functional && d.functional <= *c.target_functional) return true;
  if (c.target_distance && d.distance_to_solution &&
      *d.distance_to_solution <= *c.target_distance)
    return true;
  return false;
}

}  // namespace

RunRecord run(const QuadraticProblem& problem, const Vector& q0, const MethodConfig& config) {
  config.validate();
  require(q0.space() && q0.space()->same_as(*problem.domain()), ErrorCode::DimensionMismatch,
          "starting point is not in the problem domain");
  const auto started = std::chrono::steady_clock::now();

  RunRecord rec;
  rec.config = config;
  auto stepper = make_stepper(problem, config);
  Vector q = q0;
  Evaluation ev;
  int k = 0;
  int steps_taken = 0;

  auto record_failure = [&](int at, std::string message) {
    rec.stop_reason = StopReason::NumericalFailure;
    rec.failure_iteration = at;
    rec.failure_message = std::move(message);
  };

  bool evaluated = false;
  try {
    ev = problem.evaluate(q);
    evaluated = true;
  } catch (const Error& e) {
    record_failure(0, e.what());
  }

  if (evaluated) {
    rec.stop_reason = StopReason::Budget;
    for (; k < config.max_iterations; ++k) {
      StepDiagnostics here = base_diagnostics(ev);
      here.k = k;
      attach_distances(problem, q, here);
      if (target_met(config, here)) {
        rec.per_step.push_back(here);
        rec.stop_reason = StopReason::TargetReached;
        break;
      }

      StepResult r;
      try {
        r = stepper->advance(q, ev);
      } catch (const Error& e) {
        record_failure(k, e.what());
        break;
      }
      r.diag.k = k;
      r.diag.distance_to_solution = here.distance_to_solution;
      r.diag.distance_euclidean = here.distance_euclidean;

      if (r.outcome != StepOutcome::Advanced) {
        rec.per_step.push_back(r.diag);
        if (r.outcome == StepOutcome::TargetReached) rec.stop_reason = StopReason::TargetReached;
        if (r.outcome == StepOutcome::Degenerate) rec.stop_reason = StopReason::Degenerate;
        if (r.outcome == StepOutcome::NumericalFailure)
          record_failure(k, "zero gradient with positive functional (inconsistent problem)");
        break;
      }
      if (!r.q_next.all_finite()) {
        rec.per_step.push_back(r.diag);
        record_failure(k, "non-finite iterate");
        break;
      }
      rec.per_step.push_back(r.diag);
      ++steps_taken;
      q = std::move(r.q_next);
      try {
        ev = problem.evaluate(q);
      } catch (const Error& e) {
        record_failure(k + 1, e.what());
        break;
      }
    }
  }

  rec.final_state = StepDiagnostics{};
  rec.final_state.k = steps_taken;
  if (ev.gradient.size() == q.size()) {
    rec.final_state.functional = ev.functional;
    rec.final_state.grad_norm = norm(ev.gradient);
  }
  attach_distances(problem, q, rec.final_state);
  rec.final_q = std::move(q);
  rec.wall_time = std::chrono::steady_clock::now() - started;
  return rec;
}

}  // namespace minerr
