#pragma once

// Diagonal models of compact self-adjoint operators: the eigenbasis is the
// standard basis, so iterates are tracked by their Fourier coefficients.

#include <cstddef>
#include <string>
#include <vector>

#include "minerr/hilbert.hpp"

namespace minerr {

/// Strictly positive, strictly decreasing eigenvalues of B = A^* A_0.
class Spectrum {
 public:
  Spectrum(std::vector<double> eigenvalues, std::string label, std::size_t requested_modes = 0);

  std::span<const double> eigenvalues() const noexcept { return eigenvalues_; }
  std::size_t size() const noexcept { return eigenvalues_.size(); }
  double operator[](std::size_t i) const { return eigenvalues_[i]; }
  const std::string& label() const noexcept { return label_; }
  /// Number of modes asked for; larger than size() when trailing modes
  /// underflowed and were dropped.
  std::size_t requested_modes() const noexcept { return requested_; }
  bool truncated() const noexcept { return requested_ > eigenvalues_.size(); }

 private:
  std::vector<double> eigenvalues_;
  std::string label_;
  std::size_t requested_;
};

/// 1 / cosh(sqrt(pi^2 n^2 - kappa^2)), the singular value of the boundary
/// continuation operator on sine mode n.
double helmholtz_singular_value(double kappa, std::size_t n);

/// lambda_n = 1 / cosh^2 sqrt(pi^2 n^2 - kappa^2), n = 1..n_modes. Modes whose
/// eigenvalue underflows below the smallest normal double are dropped.
Spectrum make_helmholtz_spectrum(double kappa, std::size_t n_modes);

/// lambda_n = exp(-2 pi^2 kappa^2 n^2), n = 1..n_modes, with the same underflow rule.
Spectrum make_heat_spectrum(double kappa, std::size_t n_modes);

/// Quadratic problem with A_0 = diag(sqrt(lambda_n)) on unit weights, q* = 0,
/// f = 0 and start q0 = xi, so q0 - q* has coefficients xi.
struct DiagonalProblem {
  Spectrum spectrum;
  std::vector<double> xi;
  QuadraticProblem problem;
  Vector start;
};

DiagonalProblem make_diagonal_problem(const Spectrum& spectrum, std::vector<double> xi);

/// ||q_k - q*||^2 = sum_n xi_n^2 (1 - alpha lambda_n)^{2k} for k = 0..steps,
/// evaluated in closed form for gradient descent with fixed step alpha.
std::vector<double> run_gradient_descent_spectral(const DiagonalProblem& problem, double alpha,
                                                  int steps);

/// Minimum over eta in R^N of
///   Psi(eta) = sum_n xi_n^2 (1 + sum_{i=1..N} eta_i lambda_n^i)^2,
/// the squared distance reachable after N steps by any Krylov-subspace method.
struct PsiMinimum {
  double psi = 0.0;
  std::vector<double> eta;            // minimizer in the original monomial basis
  double gradient_norm = 0.0;         // ||grad Psi|| in the rescaled coordinates
  double condition_estimate = 0.0;    // of the (column-equilibrated) least-squares matrix
  bool ill_conditioned = false;       // condition_estimate > 1e14
};

PsiMinimum psi_min(const Spectrum& spectrum, std::span<const double> xi, std::size_t steps);

/// Psi evaluated at a given eta (original monomial basis).
double psi_value(const Spectrum& spectrum, std::span<const double> xi,
                 std::span<const double> eta);

/// Unit-norm starting coefficients on which every Krylov method keeps
/// ||q_N - q*||^2 > epsilon after N steps: xi_1..xi_N = sqrt((1-eps)/(2N)),
/// xi_M = sqrt((1+eps)/2) with the tail index M found by search.
struct AdversarialCertificate {
  std::size_t steps = 0;         // N
  double epsilon = 0.0;
  std::size_t tail_mode = 0;     // M, 1-based
  std::vector<double> xi;        // length = spectrum size
  double xi_norm = 0.0;
  double psi_min = 0.0;
  std::vector<double> eta_hat;
  double psi_gradient_norm = 0.0;
  // Intermediate quantities of the existence argument, recorded only.
  double psi_at_head_zero = 0.0;   // Psi(eta~) where eta~ annihilates the first N modes
  double head_threshold = 0.0;     // (1 + 3 eps) / 4
  double gap_threshold = 0.0;      // (1 - eps) / 4
  std::size_t evaluations = 0;     // psi_min solves spent on the search
};

AdversarialCertificate adversarial_initial_point(const Spectrum& spectrum, std::size_t steps,
                                                 double epsilon);

}  // namespace minerr
