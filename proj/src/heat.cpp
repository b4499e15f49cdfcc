#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "minerr/pde.hpp"

namespace minerr {

namespace {

std::size_t unit_cells(double h, const char* what) {
  require(h > 0.0 && h <= 0.5, ErrorCode::InvalidArgument, std::string(what) + " must lie in (0, 0.5]");
  const double n = std::round(1.0 / h);
  if (std::abs(n * h - 1.0) > 1e-12) {
    std::ostringstream msg;
    msg << what << " = " << h << " does not divide the unit interval";
    fail(ErrorCode::InvalidArgument, msg.str());
  }
  return static_cast<std::size_t>(n);
}

double max_kappa(const HeatSetup& s) { return s.kappa_max ? *s.kappa_max : s.kappa; }

std::size_t interior_count(int dimension, std::size_t m) {
  std::size_t total = 1;
  for (int a = 0; a < dimension; ++a) total *= m;
  return total;
}

}  // namespace

HeatGrid resolve_heat_grid(const HeatSetup& setup) {
  require(setup.dimension == 1 || setup.dimension == 3, ErrorCode::InvalidArgument,
          "heat problem dimension must be 1 or 3");
  const double kmax = max_kappa(setup);
  require(kmax > 0.0 && std::isfinite(kmax), ErrorCode::InvalidArgument,
          "heat conductivity must be positive");
  HeatGrid g;
  g.h = setup.h;
  g.cells = unit_cells(setup.h, "h");
  require(g.cells >= 2, ErrorCode::InvalidArgument, "heat grid needs at least one interior node");
  const double d2 = 2.0 * setup.dimension;
  if (setup.tau) {
    require(*setup.tau > 0.0, ErrorCode::InvalidArgument, "tau must be positive");
    const double n = std::round(1.0 / *setup.tau);
    if (std::abs(n * *setup.tau - 1.0) > 1e-9) {
      std::ostringstream msg;
      msg << "tau = " << *setup.tau << " does not divide the unit time interval";
      fail(ErrorCode::InvalidArgument, msg.str());
    }
    g.steps = static_cast<std::size_t>(n);
  } else {
    const double needed = d2 * kmax * kmax / (0.9 * g.h * g.h);
    g.steps = std::max<std::size_t>(1000, static_cast<std::size_t>(std::ceil(needed)));
  }
  g.tau = 1.0 / static_cast<double>(g.steps);
  g.stability_number = kmax * kmax * g.tau * d2 / (g.h * g.h);
  if (g.stability_number > 1.0) {
    std::ostringstream msg;
    msg << "explicit heat scheme unstable: kappa_max^2 tau 2d / h^2 = " << g.stability_number
        << " > 1 (h = " << g.h << ", tau = " << g.tau << ", kappa_max = " << kmax << ")";
    fail(ErrorCode::StabilityViolation, msg.str());
  }
  return g;
}

std::vector<double> heat_kappa_squared(const HeatSetup& setup, const HeatGrid& grid) {
  const std::size_t m = grid.cells - 1;
  const std::size_t total = interior_count(setup.dimension, m);
  if (!setup.kappa_max) return std::vector<double>(total, setup.kappa * setup.kappa);
  const double hi = *setup.kappa_max, lo = hi / 5.0;
  auto inside = [&](std::size_t i) {
    const double x = static_cast<double>(i + 1) * grid.h;
    return x > 0.4 + 1e-12 && x < 0.6 - 1e-12;
  };
  std::vector<double> k2(total);
  for (std::size_t idx = 0; idx < total; ++idx) {
    bool in = true;
    std::size_t rest = idx;
    for (int a = 0; a < setup.dimension; ++a) {
      in = in && inside(rest % m);
      rest /= m;
    }
    const double k = in ? hi : lo;
    k2[idx] = k * k;
  }
  return k2;
}

double heat_exact_value(int dimension, std::span<const double> x) {
  const double tp = 2.0 * std::numbers::pi;
  if (dimension == 1) return std::sin(std::numbers::pi * x[0]);
  const double s2 = std::sin(tp * x[1]);
  const double s3 = std::sin(tp * x[2]);
  return std::sin(tp * x[0]) * s2 * s2 * s3 * s3 * s3;
}

// ---------------------------------------------------------------------------

HeatPropagator::HeatPropagator(SpacePtr space, int dimension, HeatGrid grid,
                               std::vector<double> kappa2)
    : LinearMap(space, space), dimension_(dimension), grid_(grid), kappa2_(std::move(kappa2)) {
  require(kappa2_.size() == this->domain()->dim(), ErrorCode::DimensionMismatch,
          "conductivity field does not match the grid");
}

// 5/7-point Laplacian on interior nodes, zero outside.
void HeatPropagator::laplacian(const double* u, double* out) const {
  const std::size_t m = grid_.cells - 1;
  const double inv = 1.0 / (grid_.h * grid_.h);
  if (dimension_ == 1) {
    for (std::size_t i = 0; i < m; ++i) {
      const double l = i > 0 ? u[i - 1] : 0.0;
      const double r = i + 1 < m ? u[i + 1] : 0.0;
      out[i] = (l + r - 2.0 * u[i]) * inv;
    }
    return;
  }
  const std::size_t s1 = m * m, s2 = m;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      const std::size_t row = i * s1 + j * s2;
      for (std::size_t k = 0; k < m; ++k) {
        const std::size_t c = row + k;
        double s = -6.0 * u[c];
        if (i > 0) s += u[c - s1];
        if (i + 1 < m) s += u[c + s1];
        if (j > 0) s += u[c - s2];
        if (j + 1 < m) s += u[c + s2];
        if (k > 0) s += u[c - 1];
        if (k + 1 < m) s += u[c + 1];
        out[c] = s * inv;
      }
    }
}

// u <- (I + tau K^2 Lap) u, repeated.
void HeatPropagator::apply(std::span<const double> in, std::span<double> out) const {
  const std::size_t n = in.size();
  std::copy(in.begin(), in.end(), out.begin());
  std::vector<double> lap(n);
  for (std::size_t step = 0; step < grid_.steps; ++step) {
    laplacian(out.data(), lap.data());
    for (std::size_t c = 0; c < n; ++c) out[c] += grid_.tau * kappa2_[c] * lap[c];
  }
}

// Equal weights on both sides, so the adjoint is the transpose (I + tau Lap K^2).
void HeatPropagator::apply_adjoint(std::span<const double> in, std::span<double> out) const {
  const std::size_t n = in.size();
  std::copy(in.begin(), in.end(), out.begin());
  std::vector<double> scaled(n), lap(n);
  for (std::size_t step = 0; step < grid_.steps; ++step) {
    for (std::size_t c = 0; c < n; ++c) scaled[c] = kappa2_[c] * out[c];
    laplacian(scaled.data(), lap.data());
    for (std::size_t c = 0; c < n; ++c) out[c] += grid_.tau * lap[c];
  }
}

PdeProblem make_heat_problem(const HeatSetup& setup) {
  const HeatGrid grid = resolve_heat_grid(setup);
  const std::size_t m = grid.cells - 1;
  const std::size_t total = interior_count(setup.dimension, m);
  const double weight = std::pow(grid.h, setup.dimension);
  auto space = uniform_space(total, weight, "heat-interior");

  Vector exact(space);
  std::vector<double> x(static_cast<std::size_t>(setup.dimension));
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rest = idx;
    for (int a = setup.dimension - 1; a >= 0; --a) {
      x[static_cast<std::size_t>(a)] = static_cast<double>(rest % m + 1) * grid.h;
      rest /= m;
    }
    exact[idx] = heat_exact_value(setup.dimension, x);
  }

  auto map = std::make_shared<HeatPropagator>(space, setup.dimension, grid,
                                              heat_kappa_squared(setup, grid));
  AffineOperator op(map);
  Vector data = op.apply(exact);
  std::ostringstream label;
  label << "heat" << setup.dimension << "d(h=" << grid.h << ", tau=" << grid.tau << ", kappa";
  if (setup.kappa_max)
    label << "_max=" << *setup.kappa_max;
  else
    label << "=" << setup.kappa;
  label << ")";
  std::vector<Term> terms{Term{std::move(op), std::move(data)}};
  QuadraticProblem problem(std::move(terms), std::move(exact), std::nullopt, label.str());
  return PdeProblem{std::move(problem), Vector(space),
                    std::vector<std::size_t>(static_cast<std::size_t>(setup.dimension), m), grid.h};
}

}  // namespace minerr
