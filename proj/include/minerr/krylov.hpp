#pragma once

// Brute-force distance from q* to the affine Krylov manifold q0 + K_n, used to
// certify that the infinite-moment method is optimal among Krylov methods.

#include <cstddef>
#include <vector>

#include "minerr/hilbert.hpp"

namespace minerr {

/// Orthonormal basis of K_n = span{g, Bg, ..., B^{n-1} g} with g = grad J(q0)
/// and B = sum_l A_l^* A_l0.
struct KrylovBasis {
  std::vector<Vector> vectors;
  std::size_t requested = 0;      // n
  std::size_t effective_dim = 0;  // == vectors.size()
  /// Set once a candidate was found dependent; the span is then B-invariant.
  bool invariant = false;
  /// Relative residual norm of that candidate.
  double dependence_residual = 0.0;
  /// max |<v_i, v_j> - delta_ij| over the basis.
  double orthonormality_defect = 0.0;
};

/// Modified Gram-Schmidt applied twice. A candidate whose residual after
/// projection is <= rank_tolerance times its original norm is dropped and the
/// sequence stops there (the subspace is invariant under B).
KrylovBasis build_krylov_basis(const QuadraticProblem& problem, const Vector& q0, std::size_t n,
                               double rank_tolerance = 1e-12);

/// Same basis, grown by one vector from an existing one.
void extend_krylov_basis(const QuadraticProblem& problem, KrylovBasis& basis,
                         double rank_tolerance = 1e-12);

/// min over q in q0 + K_n of ||q - q*||.
double optimal_krylov_distance(const Vector& q0, const Vector& q_star, const KrylovBasis& basis);

struct Theorem1Step {
  int n = 0;
  double method_distance = 0.0;
  double oracle_distance = 0.0;
  bool bounded = false;   // method <= oracle (1 + tol) + resolution
  bool attained = false;  // |method - oracle| <= tol oracle + resolution
};

struct Theorem1Report {
  std::vector<Theorem1Step> steps;
  bool degenerate_stop = false;
  int completed_steps = 0;
  /// Smallest distance double arithmetic resolves near q*: 100 eps times the
  /// largest of |q0|, |q*|, |q0 - q*|. Once the oracle reaches zero (the Krylov
  /// space fills the domain) the method can only get within this of it.
  double resolution = 0.0;
  bool passed = false;
};

/// Runs MME(inf) for n_max steps and compares each iterate with the oracle.
Theorem1Report verify_theorem1(const QuadraticProblem& problem, const Vector& q0,
                               const Vector& q_star, int n_max, double tol);

}  // namespace minerr
