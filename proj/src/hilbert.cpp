#include "minerr/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace minerr {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid argument";
    case ErrorCode::DimensionMismatch: return "dimension mismatch";
    case ErrorCode::NumericalOverflow: return "numerical overflow";
    case ErrorCode::DegenerateDirection: return "degenerate direction";
    case ErrorCode::InvalidStep: return "invalid step";
    case ErrorCode::StabilityViolation: return "stability violation";
    case ErrorCode::NeedsLongerSpectrum: return "needs longer spectrum";
    case ErrorCode::NotAvailable: return "not available";
    case ErrorCode::Io: return "i/o error";
  }
  return "unknown";
}

Space::Space(std::vector<double> weights, std::string label)
    : weights_(std::move(weights)), label_(std::move(label)) {
  require(!weights_.empty(), ErrorCode::InvalidArgument, "space '" + label_ + "' has dimension 0");
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    if (!(weights_[i] > 0.0) || !std::isfinite(weights_[i])) {
      std::ostringstream msg;
      msg << "space '" << label_ << "': weight " << i << " = " << weights_[i] << " is not positive";
      fail(ErrorCode::InvalidArgument, msg.str());
    }
  }
}

bool Space::same_as(const Space& other) const noexcept {
  return this == &other || weights_ == other.weights_;
}

SpacePtr make_space(std::vector<double> weights, std::string label) {
  return std::make_shared<const Space>(std::move(weights), std::move(label));
}

SpacePtr uniform_space(std::size_t dim, double weight, std::string label) {
  return make_space(std::vector<double>(dim, weight), std::move(label));
}

std::vector<double> trapezoid_weights(std::size_t cells, double h) {
  require(cells >= 1, ErrorCode::InvalidArgument, "trapezoid rule needs at least one cell");
  std::vector<double> w(cells + 1, h);
  w.front() = w.back() = 0.5 * h;
  return w;
}

std::vector<double> tensor_weights(const std::vector<std::vector<double>>& axes) {
  std::vector<double> out{1.0};
  for (const auto& axis : axes) {
    std::vector<double> next;
    next.reserve(out.size() * axis.size());
    for (double a : out)
      for (double b : axis) next.push_back(a * b);
    out = std::move(next);
  }
  return out;
}

// ---------------------------------------------------------------------------

Vector::Vector(SpacePtr space) : space_(std::move(space)), values_(space_->dim(), 0.0) {}

Vector::Vector(SpacePtr space, std::vector<double> values)
    : space_(std::move(space)), values_(std::move(values)) {
  if (values_.size() != space_->dim()) {
    std::ostringstream msg;
    msg << "vector of length " << values_.size() << " does not fit space '" << space_->label()
        << "' of dimension " << space_->dim();
    fail(ErrorCode::DimensionMismatch, msg.str());
  }
}

void check_same_space(const Vector& u, const Vector& v, const char* where) {
  if (!u.space() || !v.space() || u.size() != v.size() ||
      !u.space()->same_as(*v.space())) {
    std::ostringstream msg;
    msg << where << ": operands live in different spaces (" << u.size() << " vs " << v.size()
        << ")";
    fail(ErrorCode::DimensionMismatch, msg.str());
  }
}

Vector& Vector::operator+=(const Vector& other) { return axpy(1.0, other); }
Vector& Vector::operator-=(const Vector& other) { return axpy(-1.0, other); }

Vector& Vector::operator*=(double a) {
  for (double& x : values_) x *= a;
  return *this;
}

Vector& Vector::axpy(double a, const Vector& x) {
  check_same_space(*this, x, "axpy");
  const double* xs = x.data();
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += a * xs[i];
  return *this;
}

bool Vector::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double x) { return std::isfinite(x); });
}

void Vector::set_zero() noexcept { std::fill(values_.begin(), values_.end(), 0.0); }

Vector operator+(Vector a, const Vector& b) { return a += b; }
Vector operator-(Vector a, const Vector& b) { return a -= b; }
Vector operator*(double a, Vector x) { return x *= a; }

double inner(const Space& space, const Vector& u, const Vector& v, Summation mode) {
  if (u.size() != space.dim() || v.size() != space.dim()) {
    std::ostringstream msg;
    msg << "inner: vectors of length " << u.size() << " and " << v.size()
        << " do not belong to space '" << space.label() << "' of dimension " << space.dim();
    fail(ErrorCode::DimensionMismatch, msg.str());
  }
  const double* w = space.weights().data();
  const double* a = u.data();
  const double* b = v.data();
  const std::size_t n = space.dim();
  if (mode == Summation::Plain) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += w[i] * a[i] * b[i];
    return s;
  }
  // Kahan-Babuska (Neumaier) summation.
  double s = 0.0, c = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = w[i] * a[i] * b[i];
    const double t = s + x;
    c += std::abs(s) >= std::abs(x) ? (s - t) + x : (x - t) + s;
    s = t;
  }
  return s + c;
}

double inner(const Vector& u, const Vector& v, Summation mode) {
  check_same_space(u, v, "inner");
  return inner(*u.space(), u, v, mode);
}

double norm_squared(const Vector& u) { return inner(*u.space(), u, u); }
double norm(const Vector& u) { return std::sqrt(norm_squared(u)); }

double euclidean_norm(const Vector& u) {
  double s = 0.0;
  for (double x : u.values()) s += x * x;
  return std::sqrt(s);
}

// ---------------------------------------------------------------------------

DiagonalMap::DiagonalMap(SpacePtr space, std::vector<double> diagonal)
    : LinearMap(space, space), diagonal_(std::move(diagonal)) {
  require(diagonal_.size() == domain()->dim(), ErrorCode::DimensionMismatch,
          "diagonal length does not match space dimension");
}

void DiagonalMap::apply(std::span<const double> in, std::span<double> out) const {
  for (std::size_t i = 0; i < diagonal_.size(); ++i) out[i] = diagonal_[i] * in[i];
}

void DiagonalMap::apply_adjoint(std::span<const double> in, std::span<double> out) const {
  apply(in, out);
}

void IdentityMap::apply(std::span<const double> in, std::span<double> out) const {
  std::copy(in.begin(), in.end(), out.begin());
}

void IdentityMap::apply_adjoint(std::span<const double> in, std::span<double> out) const {
  apply(in, out);
}

DenseMap::DenseMap(SpacePtr domain, SpacePtr codomain, std::vector<double> row_major)
    : LinearMap(std::move(domain), std::move(codomain)), matrix_(std::move(row_major)) {
  require(matrix_.size() == this->domain()->dim() * this->codomain()->dim(),
          ErrorCode::DimensionMismatch, "dense matrix size does not match domain x codomain");
}

void DenseMap::apply(std::span<const double> in, std::span<double> out) const {
  const std::size_t rows = codomain()->dim(), cols = domain()->dim();
  for (std::size_t r = 0; r < rows; ++r) {
    double s = 0.0;
    const double* row = matrix_.data() + r * cols;
    for (std::size_t c = 0; c < cols; ++c) s += row[c] * in[c];
    out[r] = s;
  }
}

void DenseMap::apply_adjoint(std::span<const double> in, std::span<double> out) const {
  const std::size_t rows = codomain()->dim(), cols = domain()->dim();
  const auto wc = codomain()->weights();
  const auto wd = domain()->weights();
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    const double y = wc[r] * in[r];
    const double* row = matrix_.data() + r * cols;
    for (std::size_t c = 0; c < cols; ++c) out[c] += row[c] * y;
  }
  for (std::size_t c = 0; c < cols; ++c) out[c] /= wd[c];
}

// ---------------------------------------------------------------------------

AffineOperator::AffineOperator(std::shared_ptr<const LinearMap> linear)
    : linear_(std::move(linear)), offset_(linear_->codomain()) {}

AffineOperator::AffineOperator(std::shared_ptr<const LinearMap> linear, Vector offset)
    : linear_(std::move(linear)), offset_(std::move(offset)) {
  require(offset_.space() && offset_.space()->same_as(*linear_->codomain()),
          ErrorCode::DimensionMismatch, "operator offset must live in the codomain");
}

Vector AffineOperator::apply_linear(const Vector& q) const {
  require(q.space() && q.space()->same_as(*domain()), ErrorCode::DimensionMismatch,
          "operator argument is not in its domain '" + domain()->label() + "'");
  Vector out(codomain());
  linear_->apply(q.values(), out.values());
  return out;
}

Vector AffineOperator::apply(const Vector& q) const {
  Vector out = apply_linear(q);
  const double* b = offset_.data();
  double* o = out.data();
  for (std::size_t i = 0; i < out.size(); ++i) o[i] += b[i];
  return out;
}

Vector AffineOperator::apply_adjoint(const Vector& p) const {
  require(p.space() && p.space()->same_as(*codomain()), ErrorCode::DimensionMismatch,
          "adjoint argument is not in the codomain '" + codomain()->label() + "'");
  Vector out(domain());
  linear_->apply_adjoint(p.values(), out.values());
  return out;
}

// ---------------------------------------------------------------------------

QuadraticProblem::QuadraticProblem(std::vector<Term> terms, std::optional<Vector> exact_solution,
                                   std::optional<double> lipschitz, std::string label)
    : terms_(std::move(terms)),
      exact_(std::move(exact_solution)),
      lipschitz_(lipschitz),
      label_(std::move(label)) {
  require(!terms_.empty(), ErrorCode::InvalidArgument, "a problem needs at least one term");
  for (std::size_t l = 0; l < terms_.size(); ++l) {
    const Term& t = terms_[l];
    require(t.op.domain()->same_as(*terms_.front().op.domain()), ErrorCode::DimensionMismatch,
            "term " + std::to_string(l) + " has a different domain");
    require(t.data.space() && t.data.space()->same_as(*t.op.codomain()),
            ErrorCode::DimensionMismatch,
            "data of term " + std::to_string(l) + " is not in the operator codomain");
  }
  if (lipschitz_)
    require(*lipschitz_ >= 0.0, ErrorCode::InvalidArgument, "Lipschitz constant must be >= 0");
  if (exact_) {
    require(exact_->space() && exact_->space()->same_as(*domain()), ErrorCode::DimensionMismatch,
            "exact solution is not in the problem domain");
    const double j_star = functional(*exact_);
    const double j_zero = functional(Vector(domain()));
    if (!(j_star <= 1e-20 * std::max(1.0, j_zero))) {
      std::ostringstream msg;
      msg << "supplied exact solution is inconsistent: J(q*) = " << j_star;
      fail(ErrorCode::InvalidArgument, msg.str());
    }
  }
}

namespace {

void check_finite(double value, std::size_t term) {
  if (!std::isfinite(value)) {
    std::ostringstream msg;
    msg << "non-finite residual norm in term " << term;
    fail(ErrorCode::NumericalOverflow, msg.str());
  }
}

}  // namespace

double QuadraticProblem::functional(const Vector& q) const {
  double total = 0.0;
  for (std::size_t l = 0; l < terms_.size(); ++l) {
    Vector r = terms_[l].op.apply(q) - terms_[l].data;
    const double part = norm_squared(r);
    check_finite(part, l);
    total += part;
  }
  return 0.5 * total;
}

Vector QuadraticProblem::gradient(const Vector& q) const { return evaluate(q).gradient; }

Evaluation QuadraticProblem::evaluate(const Vector& q) const {
  Evaluation ev{0.0, Vector(domain())};
  for (std::size_t l = 0; l < terms_.size(); ++l) {
    Vector r = terms_[l].op.apply(q) - terms_[l].data;
    const double part = norm_squared(r);
    check_finite(part, l);
    ev.functional += part;
    ev.gradient += terms_[l].op.apply_adjoint(r);
  }
  ev.functional *= 0.5;
  if (!ev.gradient.all_finite())
    fail(ErrorCode::NumericalOverflow, "non-finite gradient");
  return ev;
}

double QuadraticProblem::curvature(const Vector& s) const {
  double total = 0.0;
  for (const Term& t : terms_) total += norm_squared(t.op.apply_linear(s));
  return total;
}

Vector QuadraticProblem::apply_normal(const Vector& s) const {
  Vector out(domain());
  for (const Term& t : terms_) out += t.op.apply_adjoint(t.op.apply_linear(s));
  return out;
}

double QuadraticProblem::distance_to_solution(const Vector& q) const {
  require(exact_.has_value(), ErrorCode::NotAvailable, "problem has no exact solution");
  return norm(q - *exact_);
}

double functional_value(const QuadraticProblem& problem, const Vector& q) {
  return problem.functional(q);
}

Vector gradient(const QuadraticProblem& problem, const Vector& q) { return problem.gradient(q); }

// ---------------------------------------------------------------------------

Vector random_unit_vector(const SpacePtr& space, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Vector v(space);
  for (;;) {
    for (double& x : v.values()) x = normal(rng);
    const double n = norm(v);
    if (n > 0.0) return v *= 1.0 / n;
  }
}

AdjointReport verify_adjoint(const AffineOperator& op, int trials, double tol, std::uint64_t seed) {
  require(trials >= 1, ErrorCode::InvalidArgument, "verify_adjoint needs at least one trial");
  AdjointReport report{trials, 0.0, tol, false};
  for (int t = 0; t < trials; ++t) {
    const Vector q = random_unit_vector(op.domain(), seed + 2 * t);
    const Vector p = random_unit_vector(op.codomain(), seed + 2 * t + 1);
    const Vector aq = op.apply_linear(q);
    const Vector ap = op.apply_adjoint(p);
    const double lhs = inner(aq, p);
    const double rhs = inner(q, ap);
    const double scale = std::max(norm(aq), norm(ap));
    const double defect = scale > 0.0 ? std::abs(lhs - rhs) / scale : std::abs(lhs - rhs);
    report.max_defect = std::max(report.max_defect, defect);
  }
  report.passed = report.max_defect <= tol;
  return report;
}

double estimate_operator_norm(const QuadraticProblem& problem, int iterations, std::uint64_t seed) {
  require(iterations >= 1, ErrorCode::InvalidArgument, "power iteration needs >= 1 iteration");
  Vector x = random_unit_vector(problem.domain(), seed);
  double rayleigh = 0.0;
  for (int it = 0; it < iterations; ++it) {
    Vector bx = problem.apply_normal(x);
    rayleigh = inner(x, bx);
    const double n = norm(bx);
    if (n == 0.0) {
      // x fell into the kernel; B might still be nonzero elsewhere.
      if (it == 0) {
        x = random_unit_vector(problem.domain(), seed + 0x9e3779b97f4a7c15ULL);
        bx = problem.apply_normal(x);
        if (norm(bx) == 0.0) return 0.0;
        rayleigh = inner(x, bx);
        x = std::move(bx);
        x *= 1.0 / norm(x);
        continue;
      }
      return rayleigh;
    }
    x = std::move(bx);
    x *= 1.0 / n;
  }
  return rayleigh;
}

double lipschitz_constant(const QuadraticProblem& problem, std::uint64_t seed) {
  if (problem.lipschitz()) return *problem.lipschitz();
  return estimate_operator_norm(problem, 200, seed);
}

}  // namespace minerr
