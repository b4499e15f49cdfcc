#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "minerr/pde.hpp"

namespace minerr {

const char* to_string(Face face) {
  switch (face) {
    case Face::Left: return "x=0";
    case Face::Right: return "x=1";
    case Face::Top: return "y=1";
  }
  return "?";
}

WaveGrid resolve_wave_grid(const ThermoacousticSetup& setup) {
  require(setup.h > 0.0 && setup.h <= 0.5, ErrorCode::InvalidArgument, "h must lie in (0, 0.5]");
  require(setup.tau > 0.0 && setup.tau <= 1.0, ErrorCode::InvalidArgument,
          "tau must lie in (0, 1]");
  WaveGrid g;
  const double n = std::round(1.0 / setup.h);
  const double nt = std::round(1.0 / setup.tau);
  if (std::abs(n * setup.h - 1.0) > 1e-12 || std::abs(nt * setup.tau - 1.0) > 1e-12) {
    std::ostringstream msg;
    msg << "h = " << setup.h << " and tau = " << setup.tau << " must divide the unit extents";
    fail(ErrorCode::InvalidArgument, msg.str());
  }
  g.cells = static_cast<std::size_t>(n);
  g.steps = static_cast<std::size_t>(nt);
  g.h = 1.0 / n;
  g.tau = 1.0 / nt;
  const double courant = g.tau / g.h;
  if (courant > 1.0 / std::numbers::sqrt2 + 1e-12) {
    std::ostringstream msg;
    msg << "leapfrog scheme violates the CFL bound: tau / h = " << courant << " > 1/sqrt(2)";
    fail(ErrorCode::StabilityViolation, msg.str());
  }
  return g;
}

double thermoacoustic_exact_value(double x, double y) {
  auto in_band = [](double z) {
    constexpr double e = 1e-12;
    return (z >= 0.125 - e && z <= 0.375 + e) || (z >= 0.625 - e && z <= 0.875 + e);
  };
  double v = 0.1;
  if (in_band(x) && in_band(y)) {
    const double f = 8.0 * std::numbers::pi;
    v += (1.0 + std::cos(f * x)) * (1.0 + std::cos(f * y)) / 32.0;
  }
  return v;
}

// ---------------------------------------------------------------------------

WaveTraceMap::WaveTraceMap(SpacePtr domain, SpacePtr codomain, WaveGrid grid, Face face)
    : LinearMap(std::move(domain), std::move(codomain)), grid_(grid), face_(face) {
  const std::size_t side = grid_.cells + 1;
  require(this->domain()->dim() == side * side, ErrorCode::DimensionMismatch,
          "wave domain does not match the grid");
  require(this->codomain()->dim() == (grid_.steps + 1) * side, ErrorCode::DimensionMismatch,
          "trace codomain does not match the grid");
  time_weights_ = trapezoid_weights(grid_.steps, grid_.tau);
}

std::size_t WaveTraceMap::face_node(std::size_t k) const {
  const std::size_t n = grid_.cells, side = n + 1;
  switch (face_) {
    case Face::Left: return k;
    case Face::Right: return n * side + k;
    case Face::Top: return k * side + n;
  }
  return 0;
}

// Five-point Laplacian, zero normal derivative by reflecting across the boundary.
void WaveTraceMap::laplacian(const double* u, double* out) const {
  const std::size_t n = grid_.cells, side = n + 1;
  const double inv = 1.0 / (grid_.h * grid_.h);
  for (std::size_t i = 0; i <= n; ++i) {
    const double* row = u + i * side;
    const double* up = u + (i > 0 ? i - 1 : 1) * side;
    const double* down = u + (i < n ? i + 1 : n - 1) * side;
    double* o = out + i * side;
    for (std::size_t j = 0; j <= n; ++j) {
      const double l = row[j > 0 ? j - 1 : 1];
      const double r = row[j < n ? j + 1 : n - 1];
      o[j] = (up[j] + down[j] + l + r - 4.0 * row[j]) * inv;
    }
  }
}

void WaveTraceMap::apply(std::span<const double> in, std::span<double> out) const {
  const std::size_t side = grid_.cells + 1, nodes = side * side;
  const double t2 = grid_.tau * grid_.tau;
  std::vector<double> prev(in.begin(), in.end()), cur(nodes), next(nodes), lap(nodes);
  auto record = [&](std::size_t level, const std::vector<double>& u) {
    double* o = out.data() + level * side;
    for (std::size_t k = 0; k < side; ++k) o[k] = u[face_node(k)];
  };
  record(0, prev);
  laplacian(prev.data(), lap.data());
  for (std::size_t c = 0; c < nodes; ++c) cur[c] = prev[c] + 0.5 * t2 * lap[c];
  record(1, cur);
  for (std::size_t j = 1; j < grid_.steps; ++j) {
    laplacian(cur.data(), lap.data());
    for (std::size_t c = 0; c < nodes; ++c) next[c] = 2.0 * cur[c] - prev[c] + t2 * lap[c];
    std::swap(prev, cur);
    std::swap(cur, next);
    record(j + 1, cur);
  }
}

// Reverse sweep of the leapfrog recurrence in W^{-1}-scaled adjoint variables,
// which lets the (weight-symmetric) Laplacian stand in for its transpose:
//   nu_j = W^{-1} P^T (W_c p)_j + C nu_{j+1} - nu_{j+2},  C = 2 + tau^2 Lap,
//   A^* p = W^{-1} P^T (W_c p)_0 + S nu_1 - nu_2,          S = 1 + tau^2 Lap / 2.
void WaveTraceMap::apply_adjoint(std::span<const double> in, std::span<double> out) const {
  const std::size_t side = grid_.cells + 1, nodes = side * side;
  const double t2 = grid_.tau * grid_.tau;
  const auto wd = domain()->weights();
  const auto wc = codomain()->weights();
  auto inject = [&](std::size_t level, std::vector<double>& target) {
    const double* p = in.data() + level * side;
    const double* w = wc.data() + level * side;
    for (std::size_t k = 0; k < side; ++k) {
      const std::size_t node = face_node(k);
      target[node] += w[k] * p[k] / wd[node];
    }
  };
  std::vector<double> nu1(nodes, 0.0), nu2(nodes, 0.0), nu(nodes), lap(nodes);
  inject(grid_.steps, nu1);
  for (std::size_t j = grid_.steps - 1; j >= 1; --j) {
    laplacian(nu1.data(), lap.data());
    for (std::size_t c = 0; c < nodes; ++c) nu[c] = 2.0 * nu1[c] + t2 * lap[c] - nu2[c];
    inject(j, nu);
    std::swap(nu2, nu1);
    std::swap(nu1, nu);
  }
  laplacian(nu1.data(), lap.data());
  for (std::size_t c = 0; c < nodes; ++c) out[c] = nu1[c] + 0.5 * t2 * lap[c] - nu2[c];
  std::vector<double> base(nodes, 0.0);
  inject(0, base);
  for (std::size_t c = 0; c < nodes; ++c) out[c] += base[c];
}

std::vector<double> WaveTraceMap::continuous_adjoint(std::span<const double> p) const {
  const std::size_t side = grid_.cells + 1, nodes = side * side;
  require(p.size() == codomain()->dim(), ErrorCode::DimensionMismatch,
          "trace has the wrong size");
  const double t2 = grid_.tau * grid_.tau;
  const double flux = -2.0 / grid_.h;
  // Backward leapfrog: psi^{j-1} = 2 psi^j - psi^{j+1} + tau^2 (Lap psi^j + flux term).
  auto step = [&](std::size_t level, const std::vector<double>& cur,
                  const std::vector<double>& later, std::vector<double>& earlier) {
    std::vector<double> lap(nodes);
    laplacian(cur.data(), lap.data());
    for (std::size_t k = 0; k < side; ++k) lap[face_node(k)] += flux * p[level * side + k];
    for (std::size_t c = 0; c < nodes; ++c) earlier[c] = 2.0 * cur[c] - later[c] + t2 * lap[c];
  };
  std::vector<double> later(nodes, 0.0), cur(nodes, 0.0), earlier(nodes);
  for (std::size_t j = grid_.steps; j >= 1; --j) {
    step(j, cur, later, earlier);
    std::swap(later, cur);
    std::swap(cur, earlier);
  }
  // cur = psi^0, later = psi^1; one more level for a central difference at t = 0.
  step(0, cur, later, earlier);
  std::vector<double> out(nodes);
  for (std::size_t c = 0; c < nodes; ++c) out[c] = (later[c] - earlier[c]) / (2.0 * grid_.tau);
  return out;
}

// ---------------------------------------------------------------------------

PdeProblem make_thermoacoustic_problem(const ThermoacousticSetup& setup) {
  const WaveGrid grid = resolve_wave_grid(setup);
  const std::size_t n = grid.cells, side = n + 1;
  const auto wx = trapezoid_weights(n, grid.h);
  auto domain = make_space(tensor_weights({wx, wx}), "square-nodes");
  auto codomain = make_space(tensor_weights({trapezoid_weights(grid.steps, grid.tau), wx}),
                             "face-time");

  Vector exact(domain);
  for (std::size_t i = 0; i <= n; ++i)
    for (std::size_t j = 0; j <= n; ++j)
      exact[i * side + j] = thermoacoustic_exact_value(static_cast<double>(i) * grid.h,
                                                       static_cast<double>(j) * grid.h);

  std::vector<Term> terms;
  for (Face face : {Face::Left, Face::Right, Face::Top}) {
    AffineOperator op(std::make_shared<WaveTraceMap>(domain, codomain, grid, face));
    Vector data = op.apply(exact);
    terms.push_back(Term{std::move(op), std::move(data)});
  }
  std::ostringstream label;
  label << "thermoacoustic(h=" << grid.h << ", tau=" << grid.tau << ")";
  QuadraticProblem problem(std::move(terms), std::move(exact), std::nullopt, label.str());
  Vector start(domain, std::vector<double>(side * side, setup.start_value));
  return PdeProblem{std::move(problem), std::move(start), {side, side}, grid.h};
}

}  // namespace minerr
