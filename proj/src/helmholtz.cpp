#include <cmath>
#include <numbers>
#include <sstream>

#include "minerr/pde.hpp"
#include "minerr/spectral.hpp"

namespace minerr {

namespace {

void check_setup(const HelmholtzSetup& s) {
  require(s.kappa >= 0.0 && s.kappa < std::numbers::pi, ErrorCode::InvalidArgument,
          "helmholtz problem needs 0 <= kappa < pi");
  require(s.n_modes >= 2, ErrorCode::InvalidArgument, "helmholtz problem needs >= 2 modes");
}

double omega(double kappa, std::size_t n) {
  const double pn = std::numbers::pi * static_cast<double>(n);
  return std::sqrt(pn * pn - kappa * kappa);
}

}  // namespace

std::vector<double> helmholtz_exact_coefficients(std::size_t n_modes) {
  std::vector<double> c(n_modes, 0.0);
  for (std::size_t n = 1; n <= n_modes; n += 2) {
    const double a = static_cast<double>(n) * std::numbers::pi;
    c[n - 1] = 8.0 / (a * a * a);
  }
  return c;
}

// Mode n of u solves u'' - w^2 u = -c_n x with u'(0) = g_n and u(1) = 0, where c_n
// are the sine coefficients of 2 - y + y^2 and g_n those of y - y^2. With
// u = a cosh(wx) + b sinh(wx) + c_n x / w^2 the trace at x = 0 is a.
std::vector<double> helmholtz_offset(const HelmholtzSetup& setup) {
  check_setup(setup);
  const auto g = helmholtz_exact_coefficients(setup.n_modes);
  std::vector<double> offset(setup.n_modes, 0.0);
  for (std::size_t n = 1; n <= setup.n_modes; n += 2) {
    const double a = static_cast<double>(n) * std::numbers::pi;
    const double c = 8.0 / a - 8.0 / (a * a * a);
    const double w = omega(setup.kappa, n);
    const double b = (g[n - 1] - c / (w * w)) / w;
    offset[n - 1] = -(c / (w * w)) * helmholtz_singular_value(setup.kappa, n) - b * std::tanh(w);
  }
  return offset;
}

PdeProblem make_helmholtz_problem(const HelmholtzSetup& setup) {
  check_setup(setup);
  std::ostringstream label;
  label << "helmholtz(kappa=" << setup.kappa << ", modes=" << setup.n_modes << ")";
  auto space = uniform_space(setup.n_modes, 0.5, "sine-modes");
  std::vector<double> diag(setup.n_modes);
  for (std::size_t n = 1; n <= setup.n_modes; ++n)
    diag[n - 1] = helmholtz_singular_value(setup.kappa, n);
  auto a0 = std::make_shared<DiagonalMap>(space, std::move(diag));
  AffineOperator op(a0, Vector(space, helmholtz_offset(setup)));
  std::vector<Term> terms{Term{std::move(op), Vector(space)}};
  const double s1 = helmholtz_singular_value(setup.kappa, 1);
  QuadraticProblem problem(std::move(terms),
                           Vector(space, helmholtz_exact_coefficients(setup.n_modes)), s1 * s1,
                           label.str());
  return PdeProblem{std::move(problem), Vector(space), {setup.n_modes}, 0.0};
}

std::vector<double> synthesize_sine_series(std::span<const double> coefficients,
                                           std::size_t cells) {
  require(cells >= 1, ErrorCode::InvalidArgument, "synthesis grid needs >= 1 cell");
  std::vector<double> out(cells + 1, 0.0);
  for (std::size_t j = 0; j <= cells; ++j) {
    const double y = static_cast<double>(j) / static_cast<double>(cells);
    double s = 0.0;
    for (std::size_t n = 0; n < coefficients.size(); ++n)
      s += coefficients[n] * std::sin(static_cast<double>(n + 1) * std::numbers::pi * y);
    out[j] = s;
  }
  return out;
}

}  // namespace minerr
