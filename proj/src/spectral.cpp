#include "minerr/spectral.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numbers>
#include <sstream>

namespace minerr {

Spectrum::Spectrum(std::vector<double> eigenvalues, std::string label, std::size_t requested_modes)
    : eigenvalues_(std::move(eigenvalues)),
      label_(std::move(label)),
      requested_(std::max(requested_modes, eigenvalues_.size())) {
  require(eigenvalues_.size() >= 2, ErrorCode::InvalidArgument,
          "spectrum '" + label_ + "' needs at least two modes");
  for (std::size_t i = 0; i < eigenvalues_.size(); ++i) {
    require(eigenvalues_[i] > 0.0 && std::isfinite(eigenvalues_[i]), ErrorCode::InvalidArgument,
            "spectrum '" + label_ + "': eigenvalue " + std::to_string(i + 1) + " is not positive");
    if (i > 0)
      require(eigenvalues_[i] < eigenvalues_[i - 1], ErrorCode::InvalidArgument,
              "spectrum '" + label_ + "' is not strictly decreasing at mode " +
                  std::to_string(i + 1));
  }
}

namespace {

// Keeps the leading run of normal (non-underflowed) values.
Spectrum finish_spectrum(std::vector<double> values, std::string label, std::size_t requested) {
  auto cut = std::find_if(values.begin(), values.end(), [](double x) { return !(x >= DBL_MIN); });
  values.erase(cut, values.end());
  if (values.size() < 2) {
    std::ostringstream msg;
    msg << label << ": only " << values.size() << " of " << requested
        << " modes are representable in double precision";
    fail(ErrorCode::NeedsLongerSpectrum, msg.str());
  }
  return Spectrum(std::move(values), std::move(label), requested);
}

// Unevaluated sum hi + lo. Large exponents need the argument to more than
// double accuracy, since exp amplifies an absolute error into a relative one.
struct Twofold {
  double hi;
  double lo;
};

Twofold two_prod(double a, double b) {
  const double p = a * b;
  return {p, std::fma(a, b, -p)};
}

Twofold quick_sum(double a, double b) {
  const double s = a + b;
  return {s, b - (s - a)};
}

Twofold mul(Twofold a, double b) {
  const Twofold p = two_prod(a.hi, b);
  return quick_sum(p.hi, p.lo + a.lo * b);
}

Twofold mul(Twofold a, Twofold b) {
  const Twofold p = two_prod(a.hi, b.hi);
  return quick_sum(p.hi, p.lo + a.hi * b.lo + a.lo * b.hi);
}

constexpr Twofold pi2{3.141592653589793116, 1.2246467991473532e-16};

// exp(-(x.hi + x.lo)) to about one ulp.
double exp_neg(Twofold x) { return std::exp(-x.hi) * (1.0 - x.lo); }

// sqrt(pi^2 n^2 - kappa^2).
Twofold helmholtz_omega(double kappa, std::size_t n) {
  const Twofold pn = mul(pi2, static_cast<double>(n));
  const Twofold sq = mul(pn, pn);
  const Twofold k2 = two_prod(kappa, kappa);
  const double d_hi = sq.hi - k2.hi;
  const double d_lo = ((sq.hi - d_hi) - k2.hi) + sq.lo - k2.lo;
  const Twofold d = quick_sum(d_hi, d_lo);
  const double r = std::sqrt(d.hi);
  return quick_sum(r, (std::fma(-r, r, d.hi) + d.lo) / (2.0 * r));
}

}  // namespace

double helmholtz_singular_value(double kappa, std::size_t n) {
  require(n >= 1, ErrorCode::InvalidArgument, "modes are numbered from 1");
  // 1/cosh w = 2 e^{-w} / (1 + e^{-2w}), which never overflows.
  const double e = exp_neg(helmholtz_omega(kappa, n));
  return 2.0 * e / (1.0 + e * e);
}

namespace {

double helmholtz_eigenvalue(double kappa, std::size_t n) {
  const Twofold w = helmholtz_omega(kappa, n);
  const double e = exp_neg({2.0 * w.hi, 2.0 * w.lo});
  const double d = 1.0 + e;
  return 4.0 * e / (d * d);
}

}  // namespace

Spectrum make_helmholtz_spectrum(double kappa, std::size_t n_modes) {
  require(kappa >= 0.0 && kappa < std::numbers::pi, ErrorCode::InvalidArgument,
          "helmholtz spectrum needs 0 <= kappa < pi");
  require(n_modes >= 1, ErrorCode::InvalidArgument, "n_modes must be >= 1");
  std::vector<double> values(n_modes);
  for (std::size_t n = 1; n <= n_modes; ++n) {
    values[n - 1] = helmholtz_eigenvalue(kappa, n);
  }
  std::ostringstream label;
  label << "helmholtz(kappa=" << kappa << ")";
  return finish_spectrum(std::move(values), label.str(), n_modes);
}

Spectrum make_heat_spectrum(double kappa, std::size_t n_modes) {
  require(kappa > 0.0 && std::isfinite(kappa), ErrorCode::InvalidArgument,
          "heat spectrum needs kappa > 0");
  require(n_modes >= 1, ErrorCode::InvalidArgument, "n_modes must be >= 1");
  const Twofold pk = mul(pi2, kappa);
  const Twofold c = mul(mul(pk, pk), 2.0);
  std::vector<double> values(n_modes);
  for (std::size_t n = 1; n <= n_modes; ++n) {
    const double nn = static_cast<double>(n);
    values[n - 1] = exp_neg(mul(c, nn * nn));
  }
  std::ostringstream label;
  label << "heat(kappa=" << kappa << ")";
  return finish_spectrum(std::move(values), label.str(), n_modes);
}

// ---------------------------------------------------------------------------

DiagonalProblem make_diagonal_problem(const Spectrum& spectrum, std::vector<double> xi) {
  require(xi.size() == spectrum.size(), ErrorCode::DimensionMismatch,
          "xi must have one coefficient per mode");
  auto space = uniform_space(spectrum.size(), 1.0, "modes:" + spectrum.label());
  std::vector<double> root(spectrum.size());
  for (std::size_t n = 0; n < root.size(); ++n) root[n] = std::sqrt(spectrum[n]);
  auto a0 = std::make_shared<DiagonalMap>(space, std::move(root));
  std::vector<Term> terms{Term{AffineOperator(a0), Vector(space)}};
  Vector start(space, xi);
  QuadraticProblem problem(std::move(terms), Vector(space), spectrum[0],
                           "diagonal:" + spectrum.label());
  return DiagonalProblem{spectrum, std::move(xi), std::move(problem), std::move(start)};
}

std::vector<double> run_gradient_descent_spectral(const DiagonalProblem& problem, double alpha,
                                                  int steps) {
  require(steps >= 0, ErrorCode::InvalidArgument, "step count must be >= 0");
  const Spectrum& sp = problem.spectrum;
  if (!(alpha > 0.0) || alpha * sp[0] > 1.0 + 1e-15) {
    std::ostringstream msg;
    msg << "step " << alpha << " outside (0, 1/lambda_1] with lambda_1 = " << sp[0];
    fail(ErrorCode::InvalidStep, msg.str());
  }
  std::vector<double> factor(sp.size());
  for (std::size_t n = 0; n < sp.size(); ++n) {
    const double f = std::max(0.0, 1.0 - alpha * sp[n]);
    factor[n] = f * f;
  }
  std::vector<double> out(static_cast<std::size_t>(steps) + 1);
  for (int k = 0; k <= steps; ++k) {
    double s = 0.0;
    for (std::size_t n = 0; n < sp.size(); ++n) {
      const double x = problem.xi[n];
      if (x != 0.0) s += x * x * std::pow(factor[n], k);
    }
    out[static_cast<std::size_t>(k)] = s;
  }
  return out;
}

// ---------------------------------------------------------------------------

double psi_value(const Spectrum& spectrum, std::span<const double> xi,
                 std::span<const double> eta) {
  require(xi.size() <= spectrum.size(), ErrorCode::DimensionMismatch,
          "more coefficients than modes");
  double total = 0.0;
  for (std::size_t n = 0; n < xi.size(); ++n) {
    if (xi[n] == 0.0) continue;
    double p = 1.0, power = 1.0;
    for (double e : eta) {
      power *= spectrum[n];
      p += e * power;
    }
    total += xi[n] * xi[n] * p * p;
  }
  return total;
}

// Psi(eta) = || xi + D V theta ||^2 with D = diag(xi), V_{n,i} = (lambda_n / lambda_1)^i and
// theta_i = eta_i lambda_1^i. Only modes with xi_n != 0 contribute rows. Columns are
// equilibrated before a column-pivoted QR least-squares solve.
PsiMinimum psi_min(const Spectrum& spectrum, std::span<const double> xi, std::size_t steps) {
  require(steps >= 1, ErrorCode::InvalidArgument, "psi_min needs N >= 1");
  require(xi.size() <= spectrum.size(), ErrorCode::DimensionMismatch,
          "more coefficients than modes");
  std::vector<std::size_t> rows;
  for (std::size_t n = 0; n < xi.size(); ++n)
    if (xi[n] != 0.0) rows.push_back(n);

  PsiMinimum out;
  out.eta.assign(steps, 0.0);
  if (rows.empty()) return out;

  const auto m = static_cast<Eigen::Index>(rows.size());
  const auto cols = static_cast<Eigen::Index>(steps);
  const double l1 = spectrum[0];
  Eigen::MatrixXd a(m, cols);
  Eigen::VectorXd b(m);
  for (Eigen::Index r = 0; r < m; ++r) {
    const std::size_t n = rows[static_cast<std::size_t>(r)];
    const double ratio = spectrum[n] / l1;
    double power = 1.0;
    for (Eigen::Index i = 0; i < cols; ++i) {
      power *= ratio;
      a(r, i) = xi[n] * power;
    }
    b(r) = -xi[n];
  }
  Eigen::VectorXd scale(cols);
  for (Eigen::Index i = 0; i < cols; ++i) {
    const double c = a.col(i).norm();
    scale(i) = c > 0.0 ? 1.0 / c : 1.0;
    a.col(i) *= scale(i);
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::VectorXd theta = qr.solve(b);
  // One step of iterative refinement on the residual.
  theta += qr.solve(b - a * theta);

  const Eigen::VectorXd residual = a * theta - b;
  out.psi = residual.squaredNorm();
  out.gradient_norm = (2.0 * a.transpose() * residual).norm();

  const auto& r = qr.matrixR();
  const Eigen::Index rank = std::min(m, cols);
  double dmax = 0.0, dmin = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < rank; ++i) {
    dmax = std::max(dmax, std::abs(r(i, i)));
    dmin = std::min(dmin, std::abs(r(i, i)));
  }
  out.condition_estimate = dmin > 0.0 ? dmax / dmin : std::numeric_limits<double>::infinity();
  out.ill_conditioned = out.condition_estimate > 1e14;

  double l1_power = 1.0;
  for (Eigen::Index i = 0; i < cols; ++i) {
    l1_power *= l1;
    out.eta[static_cast<std::size_t>(i)] = theta(i) * scale(i) / l1_power;
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<double> adversarial_xi(std::size_t modes, std::size_t steps, double eps,
                                   std::size_t tail) {
  std::vector<double> xi(modes, 0.0);
  const double head = std::sqrt((1.0 - eps) / (2.0 * static_cast<double>(steps)));
  for (std::size_t n = 0; n < steps; ++n) xi[n] = head;
  xi[tail - 1] = std::sqrt((1.0 + eps) / 2.0);
  return xi;
}

}  // namespace

AdversarialCertificate adversarial_initial_point(const Spectrum& spectrum, std::size_t steps,
                                                 double epsilon) {
  require(epsilon > 0.0 && epsilon < 1.0, ErrorCode::InvalidArgument, "epsilon must lie in (0, 1)");
  require(steps >= 1, ErrorCode::InvalidArgument, "N must be >= 1");
  const std::size_t modes = spectrum.size();
  if (modes < steps + 1) {
    std::ostringstream msg;
    msg << "spectrum has " << modes << " modes; N = " << steps << " needs at least " << steps + 1;
    fail(ErrorCode::NeedsLongerSpectrum, msg.str());
  }

  AdversarialCertificate cert;
  cert.steps = steps;
  cert.epsilon = epsilon;
  double best = 0.0;
  auto certifies = [&](std::size_t tail) {
    const auto xi = adversarial_xi(modes, steps, epsilon, tail);
    const PsiMinimum pm = psi_min(spectrum, xi, steps);
    ++cert.evaluations;
    best = std::max(best, pm.psi);
    return pm.psi > epsilon;
  };

  // Doubling from N+1, then bisection between the last failing and first passing tail.
  std::size_t lo = steps;  // index known not to certify (or the head itself)
  std::size_t hi = 0;
  for (std::size_t offset = 1;; offset *= 2) {
    const std::size_t tail = std::min(steps + offset, modes);
    if (certifies(tail)) {
      hi = tail;
      break;
    }
    lo = tail;
    if (tail == modes) break;
  }
  if (hi == 0) {
    std::ostringstream msg;
    msg << "no tail mode up to " << modes << " certifies psi_min > " << epsilon
        << " (largest psi_min " << best << "); raise n_modes";
    fail(ErrorCode::NeedsLongerSpectrum, msg.str());
  }
  while (hi - lo > 1) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (certifies(mid))
      hi = mid;
    else
      lo = mid;
  }

  cert.tail_mode = hi;
  cert.xi = adversarial_xi(modes, steps, epsilon, hi);
  double norm2 = 0.0;
  for (double x : cert.xi) norm2 += x * x;
  cert.xi_norm = std::sqrt(norm2);
  const PsiMinimum pm = psi_min(spectrum, cert.xi, steps);
  cert.psi_min = pm.psi;
  cert.eta_hat = pm.eta;
  cert.psi_gradient_norm = pm.gradient_norm;

  // eta~ makes 1 + sum eta_i lambda^i = prod_{n<=N} (1 - lambda / lambda_n), vanishing on the head.
  double p = 1.0;
  for (std::size_t n = 0; n < steps; ++n) p *= 1.0 - spectrum[hi - 1] / spectrum[n];
  cert.psi_at_head_zero = cert.xi[hi - 1] * cert.xi[hi - 1] * p * p;
  cert.head_threshold = (1.0 + 3.0 * epsilon) / 4.0;
  cert.gap_threshold = (1.0 - epsilon) / 4.0;
  return cert;
}

}  // namespace minerr
