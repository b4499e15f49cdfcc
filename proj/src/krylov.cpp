#include "minerr/krylov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "minerr/optimizers.hpp"

namespace minerr {

namespace {

// Orthogonalize v against the basis twice; returns the final norm.
double orthogonalize(std::vector<Vector>& basis, Vector& v) {
  for (int pass = 0; pass < 2; ++pass)
    for (const Vector& b : basis) v.axpy(-inner(v, b), b);
  return norm(v);
}

double measure_orthonormality(const std::vector<Vector>& basis) {
  double worst = 0.0;
  for (std::size_t i = 0; i < basis.size(); ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      const double target = i == j ? 1.0 : 0.0;
      worst = std::max(worst, std::abs(inner(basis[i], basis[j]) - target));
    }
  return worst;
}

bool try_append(KrylovBasis& basis, Vector candidate, double rank_tolerance) {
  const double original = norm(candidate);
  if (original == 0.0) {
    basis.invariant = true;
    return false;
  }
  const double residual = orthogonalize(basis.vectors, candidate);
  if (residual <= rank_tolerance * original) {
    basis.invariant = true;
    basis.dependence_residual = residual / original;
    return false;
  }
  candidate *= 1.0 / residual;
  basis.vectors.push_back(std::move(candidate));
  return true;
}

}  // namespace

KrylovBasis build_krylov_basis(const QuadraticProblem& problem, const Vector& q0, std::size_t n,
                               double rank_tolerance) {
  require(n >= 1, ErrorCode::InvalidArgument, "Krylov dimension must be >= 1");
  KrylovBasis basis;
  basis.requested = 1;
  try_append(basis, problem.gradient(q0), rank_tolerance);
  while (basis.requested < n) extend_krylov_basis(problem, basis, rank_tolerance);
  basis.effective_dim = basis.vectors.size();
  basis.orthonormality_defect = measure_orthonormality(basis.vectors);
  return basis;
}

void extend_krylov_basis(const QuadraticProblem& problem, KrylovBasis& basis,
                         double rank_tolerance) {
  ++basis.requested;
  if (basis.vectors.empty() || basis.invariant) {
    basis.effective_dim = basis.vectors.size();
    return;
  }
  try_append(basis, problem.apply_normal(basis.vectors.back()), rank_tolerance);
  basis.effective_dim = basis.vectors.size();
}

double optimal_krylov_distance(const Vector& q0, const Vector& q_star, const KrylovBasis& basis) {
  Vector e = q0 - q_star;
  for (int pass = 0; pass < 2; ++pass)
    for (const Vector& v : basis.vectors) e.axpy(-inner(e, v), v);
  return norm(e);
}

Theorem1Report verify_theorem1(const QuadraticProblem& problem, const Vector& q0,
                               const Vector& q_star, int n_max, double tol) {
  require(n_max >= 1, ErrorCode::InvalidArgument, "n_max must be >= 1");
  Theorem1Report report;
  IterateState state(q0);
  KrylovBasis basis = build_krylov_basis(problem, q0, 1);
  report.resolution = 100.0 * std::numeric_limits<double>::epsilon() *
                      std::max({norm(q0), norm(q_star), norm(q0 - q_star)});
  bool all_ok = true;
  for (int n = 1; n <= n_max; ++n) {
    StepResult r = step_mme(problem, state, kInfiniteMoments);
    if (r.outcome != StepOutcome::Advanced) {
      report.degenerate_stop = r.outcome == StepOutcome::Degenerate;
      break;
    }
    if (n > 1) extend_krylov_basis(problem, basis);
    Theorem1Step s;
    s.n = n;
    s.method_distance = norm(state.q - q_star);
    s.oracle_distance = optimal_krylov_distance(q0, q_star, basis);
    s.bounded = s.method_distance <= s.oracle_distance * (1.0 + tol) + report.resolution;
    s.attained = std::abs(s.method_distance - s.oracle_distance) <=
                 tol * s.oracle_distance + report.resolution;
    all_ok = all_ok && s.bounded && s.attained;
    report.steps.push_back(s);
    report.completed_steps = n;
  }
  report.passed = all_ok && !report.steps.empty();
  return report;
}

}  // namespace minerr
