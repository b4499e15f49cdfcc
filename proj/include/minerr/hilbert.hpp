#pragma once

// Discretized Hilbert space, affine forward operators with exact adjoints and
// the least-squares functional J(q) = 1/2 sum_l ||A_l q - f_l||^2.

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "minerr/error.hpp"

namespace minerr {

enum class Summation { Plain, Compensated };

/// Grid descriptor: number of unknowns and the positive quadrature weights
/// that define the inner product <u, v> = sum_i w_i u_i v_i.
class Space {
 public:
  Space(std::vector<double> weights, std::string label);

  std::size_t dim() const noexcept { return weights_.size(); }
  std::span<const double> weights() const noexcept { return weights_; }
  const std::string& label() const noexcept { return label_; }

  bool same_as(const Space& other) const noexcept;

 private:
  std::vector<double> weights_;
  std::string label_;
};

using SpacePtr = std::shared_ptr<const Space>;

SpacePtr make_space(std::vector<double> weights, std::string label);
SpacePtr uniform_space(std::size_t dim, double weight, std::string label);

/// Composite trapezoid weights on a uniform tensor grid. `axes[a]` holds the
/// 1-D weights of axis a; the last axis varies fastest.
std::vector<double> tensor_weights(const std::vector<std::vector<double>>& axes);

/// 1-D trapezoid weights on n+1 nodes with spacing h (half weights at both ends).
std::vector<double> trapezoid_weights(std::size_t cells, double h);

class Vector {
 public:
  Vector() = default;
  explicit Vector(SpacePtr space);
  Vector(SpacePtr space, std::vector<double> values);

  const SpacePtr& space() const noexcept { return space_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }
  double* data() noexcept { return values_.data(); }
  const double* data() const noexcept { return values_.data(); }

  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  Vector& operator+=(const Vector& other);
  Vector& operator-=(const Vector& other);
  Vector& operator*=(double a);
  /// this += a * x
  Vector& axpy(double a, const Vector& x);

  bool all_finite() const noexcept;
  void set_zero() noexcept;

 private:
  SpacePtr space_;
  std::vector<double> values_;
};

Vector operator+(Vector a, const Vector& b);
Vector operator-(Vector a, const Vector& b);
Vector operator*(double a, Vector x);

/// Throws DimensionMismatch unless both vectors live in compatible spaces.
void check_same_space(const Vector& u, const Vector& v, const char* where);

double inner(const Space& space, const Vector& u, const Vector& v,
             Summation mode = Summation::Plain);
double inner(const Vector& u, const Vector& v, Summation mode = Summation::Plain);
double norm_squared(const Vector& u);
double norm(const Vector& u);
/// Plain Euclidean norm of the grid values (no quadrature weights).
double euclidean_norm(const Vector& u);

/// Linear part A_0 of a forward operator together with its adjoint with respect
/// to the weighted inner products of domain and codomain.
class LinearMap {
 public:
  LinearMap(SpacePtr domain, SpacePtr codomain)
      : domain_(std::move(domain)), codomain_(std::move(codomain)) {}
  virtual ~LinearMap() = default;

  const SpacePtr& domain() const noexcept { return domain_; }
  const SpacePtr& codomain() const noexcept { return codomain_; }

  virtual void apply(std::span<const double> in, std::span<double> out) const = 0;
  virtual void apply_adjoint(std::span<const double> in, std::span<double> out) const = 0;

 private:
  SpacePtr domain_;
  SpacePtr codomain_;
};

/// x -> diag(d) x on a single space; self-adjoint for any weights.
class DiagonalMap final : public LinearMap {
 public:
  DiagonalMap(SpacePtr space, std::vector<double> diagonal);
  void apply(std::span<const double> in, std::span<double> out) const override;
  void apply_adjoint(std::span<const double> in, std::span<double> out) const override;
  std::span<const double> diagonal() const noexcept { return diagonal_; }

 private:
  std::vector<double> diagonal_;
};

class IdentityMap final : public LinearMap {
 public:
  explicit IdentityMap(SpacePtr space) : LinearMap(space, space) {}
  void apply(std::span<const double> in, std::span<double> out) const override;
  void apply_adjoint(std::span<const double> in, std::span<double> out) const override;
};

/// Row-major dense matrix. The adjoint is W_dom^{-1} M^T W_cod.
class DenseMap final : public LinearMap {
 public:
  DenseMap(SpacePtr domain, SpacePtr codomain, std::vector<double> row_major);
  void apply(std::span<const double> in, std::span<double> out) const override;
  void apply_adjoint(std::span<const double> in, std::span<double> out) const override;

 private:
  std::vector<double> matrix_;
};

/// q -> A_0 q + A(0).
class AffineOperator {
 public:
  explicit AffineOperator(std::shared_ptr<const LinearMap> linear);
  AffineOperator(std::shared_ptr<const LinearMap> linear, Vector offset);

  const SpacePtr& domain() const noexcept { return linear_->domain(); }
  const SpacePtr& codomain() const noexcept { return linear_->codomain(); }
  const Vector& offset() const noexcept { return offset_; }
  const LinearMap& linear() const noexcept { return *linear_; }

  Vector apply(const Vector& q) const;
  Vector apply_linear(const Vector& q) const;
  Vector apply_adjoint(const Vector& p) const;

 private:
  std::shared_ptr<const LinearMap> linear_;
  Vector offset_;
};

struct Term {
  AffineOperator op;
  Vector data;
};

struct Evaluation {
  double functional = 0.0;
  Vector gradient;
};

class QuadraticProblem {
 public:
  QuadraticProblem(std::vector<Term> terms, std::optional<Vector> exact_solution = std::nullopt,
                   std::optional<double> lipschitz = std::nullopt, std::string label = {});

  const SpacePtr& domain() const noexcept { return terms_.front().op.domain(); }
  std::span<const Term> terms() const noexcept { return terms_; }
  const std::optional<Vector>& exact_solution() const noexcept { return exact_; }
  std::optional<double> lipschitz() const noexcept { return lipschitz_; }
  const std::string& label() const noexcept { return label_; }

  double functional(const Vector& q) const;
  Vector gradient(const Vector& q) const;
  /// J and grad J from one forward and one adjoint application per term.
  Evaluation evaluate(const Vector& q) const;
  /// sum_l ||A_l0 s||^2, the curvature of J along s.
  double curvature(const Vector& s) const;
  /// B s = sum_l A_l^* A_l0 s.
  Vector apply_normal(const Vector& s) const;
  /// ||q - q*|| in the weighted norm; requires an exact solution.
  double distance_to_solution(const Vector& q) const;

 private:
  std::vector<Term> terms_;
  std::optional<Vector> exact_;
  std::optional<double> lipschitz_;
  std::string label_;
};

double functional_value(const QuadraticProblem& problem, const Vector& q);
Vector gradient(const QuadraticProblem& problem, const Vector& q);

struct AdjointReport {
  int trials = 0;
  double max_defect = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

/// Randomized probe of |<A_0 q, p> - <q, A^* p>| relative to
/// max(||A_0 q|| ||p||, ||q|| ||A^* p||) over unit q, p.
AdjointReport verify_adjoint(const AffineOperator& op, int trials, double tol,
                             std::uint64_t seed = 0x5eed);

/// Power iteration for the largest eigenvalue of B = sum_l A_l^* A_l0 (the
/// Lipschitz constant of grad J). Returns the final Rayleigh quotient.
double estimate_operator_norm(const QuadraticProblem& problem, int iterations,
                              std::uint64_t seed = 0x5eed);

/// The supplied Lipschitz constant, or a 200-step power-iteration estimate.
double lipschitz_constant(const QuadraticProblem& problem, std::uint64_t seed = 0x5eed);

/// Gaussian vector normalized to unit weighted norm.
Vector random_unit_vector(const SpacePtr& space, std::uint64_t seed);

}  // namespace minerr
