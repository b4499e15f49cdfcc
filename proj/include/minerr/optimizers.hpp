#pragma once

// m-moment minimal-error methods and the first-order baselines they are
// compared against, driven by a common run loop with per-step diagnostics.

#include <chrono>
#include <deque>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "minerr/hilbert.hpp"

namespace minerr {

enum class MethodKind {
  MinimalError,
  MomentMinimalError,
  Polyak,
  GradientDescentFixed,
  HeavyBallAdaptive,
  ConjugateGradientFR,
  ConjugateGradientPR,
  ConjugateGradientOrtho,
  SimilarTriangles,
};

inline constexpr std::size_t kInfiniteMoments = std::numeric_limits<std::size_t>::max();

struct MethodConfig {
  MethodKind kind = MethodKind::MomentMinimalError;
  /// Number of retained steps m for MomentMinimalError; kInfiniteMoments keeps all.
  std::size_t moments = 1;
  /// Optional cap on stored history when moments is infinite.
  std::optional<std::size_t> history_cap;
  /// Step for GradientDescentFixed; empty selects 1/L.
  std::optional<double> fixed_step;
  int max_iterations = 100;
  double degeneracy_tolerance = 1e-12;
  std::optional<double> target_functional;
  std::optional<double> target_distance;

  static MethodConfig minimal_error(int iterations = 100);
  static MethodConfig mme(std::size_t m, int iterations = 100);
  static MethodConfig of(MethodKind kind, int iterations = 100);

  /// Throws InvalidArgument when the invariants of the fields do not hold.
  void validate() const;
};

/// Short stable identifier, e.g. "mme1", "mme_inf", "cg_fr", "stm".
std::string method_name(const MethodConfig& config);
/// Inverse of method_name; also accepts "mme:<m>" and "gd:<step>".
std::optional<MethodConfig> parse_method(std::string_view name);
/// Every method identifier the CLI understands.
std::vector<std::string> known_method_names();

struct StepDiagnostics {
  int k = 0;
  double functional = 0.0;  // J(q_k)
  double grad_norm = 0.0;   // ||grad J(q_k)||
  double alpha = 0.0;       // step length along s_k
  double sin2_phi = 1.0;    // ||s_k||^2 / ||grad J(q_k)||^2 (1 when no projection is made)
  std::optional<double> distance_to_solution;  // ||q_k - q*||, weighted
  std::optional<double> distance_euclidean;    // same on raw grid values
  double step_norm = 0.0;   // ||h_k|| = ||q_{k+1} - q_k||
  bool degenerate = false;
  bool restarted = false;   // CG-PR restart (beta < 0 clipped)
};

enum class StepOutcome { Advanced, TargetReached, Degenerate, NumericalFailure };

struct StepResult {
  Vector q_next;
  StepDiagnostics diag;
  StepOutcome outcome = StepOutcome::Advanced;
};

struct HistoryEntry {
  Vector h;
  double norm2 = 0.0;
};

/// Iterate plus the retained step history of the minimal-error family.
struct IterateState {
  Vector q;
  std::deque<HistoryEntry> history;  // most recent step at the back
  int k = 0;
  std::optional<Vector> last_direction;

  explicit IterateState(Vector start) : q(std::move(start)) {}
};

StepResult step_polyak(const QuadraticProblem& problem, const Vector& q);
StepResult step_minimal_error(const QuadraticProblem& problem, const Vector& q);

/// One m-moment minimal-error step from state.q. On Advanced the state is
/// moved to the new iterate and its history updated (evicting beyond m).
StepResult step_mme(const QuadraticProblem& problem, IterateState& state, std::size_t m,
                    double degeneracy_tolerance = 1e-12,
                    std::optional<std::size_t> history_cap = std::nullopt);

/// Same as step_mme with J and grad J already evaluated at state.q.
StepResult step_mme(const QuadraticProblem& problem, IterateState& state, const Evaluation& ev,
                    std::size_t m, double degeneracy_tolerance,
                    std::optional<std::size_t> history_cap);

/// argmin_alpha J(q + alpha s) = -<grad J(q), s> / sum_l ||A_l0 s||^2.
double exact_line_search_alpha(const QuadraticProblem& problem, const Vector& q, const Vector& s);
double exact_line_search_alpha(const QuadraticProblem& problem, const Vector& grad,
                               const Vector& s, double curvature);

/// Stateful single-step driver for any MethodKind. `advance` receives the
/// evaluation at q and proposes the next iterate.
class Stepper {
 public:
  virtual ~Stepper() = default;
  virtual StepResult advance(const Vector& q, const Evaluation& ev) = 0;
};

std::unique_ptr<Stepper> make_stepper(const QuadraticProblem& problem, const MethodConfig& config);

enum class StopReason { Budget, Degenerate, TargetReached, NumericalFailure };
const char* to_string(StopReason reason);

struct RunRecord {
  MethodConfig config;
  std::vector<StepDiagnostics> per_step;
  /// State at final_q: k = number of steps taken, functional, grad_norm and
  /// distances filled; step fields are zero.
  StepDiagnostics final_state;
  Vector final_q;
  StopReason stop_reason = StopReason::Budget;
  std::optional<int> failure_iteration;
  std::string failure_message;
  std::chrono::duration<double> wall_time{0.0};
};

RunRecord run(const QuadraticProblem& problem, const Vector& q0, const MethodConfig& config);

}  // namespace minerr
