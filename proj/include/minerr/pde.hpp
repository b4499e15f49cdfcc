#pragma once

// Discrete forward operators of three model inverse problems: boundary
// continuation for the Helmholtz equation, the retrospective heat problem and
// 2-D thermoacoustics. Every adjoint is the exact transpose of the forward
// discretization in the weighted inner products.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "minerr/hilbert.hpp"

namespace minerr {

/// A problem ready to run: functional, default start and the grid shape of
/// the unknown (last axis fastest).
struct PdeProblem {
  QuadraticProblem problem;
  Vector start;
  std::vector<std::size_t> shape;
  double spacing = 0.0;
};

// ---------------------------------------------------------------------------
// Helmholtz continuation. The unknown q(y) = u(1, y) and the data u(0, y) are
// represented by their sine coefficients on (0, 1), with weight 1/2 per mode so
// that the coefficient norm equals the L2 norm of the function.

struct HelmholtzSetup {
  double kappa = 1.0;
  std::size_t n_modes = 200;
};

/// Sine coefficients of y - y^2: 8 / (n pi)^3 for odd n, 0 for even n.
std::vector<double> helmholtz_exact_coefficients(std::size_t n_modes);
inline double helmholtz_exact_value(double y) { return y - y * y; }

/// Per-mode value of A(0): the trace at x = 0 of the solution with q = 0, source
/// r = -x (2 - y + y^2) and Neumann data u_x(0, y) = y - y^2.
std::vector<double> helmholtz_offset(const HelmholtzSetup& setup);

PdeProblem make_helmholtz_problem(const HelmholtzSetup& setup);

/// sum_n c_n sin(n pi y) on the nodes y_j = j / cells, j = 0..cells.
std::vector<double> synthesize_sine_series(std::span<const double> coefficients,
                                           std::size_t cells);

// ---------------------------------------------------------------------------
// Retrospective heat problem: q = u(., 0), A q = u(., 1) for u_t = kappa^2 Lap u on
// the unit interval or cube with zero Dirichlet data, explicit Euler in time.
// Unknowns live on interior nodes with weight h^d.

struct HeatSetup {
  int dimension = 3;
  double h = 0.04;
  /// Time step; when empty the largest 1/n_t <= 1e-3 satisfying the stability
  /// bound with a 10% margin is used.
  std::optional<double> tau;
  /// Constant coefficient, used when kappa_max is empty.
  double kappa = 1.0;
  /// Piecewise field: kappa_max inside (0.4, 0.6)^d, kappa_max / 5 elsewhere.
  std::optional<double> kappa_max;
};

struct HeatGrid {
  std::size_t cells = 0;       // per axis; interior nodes = cells - 1
  double h = 0.0;
  double tau = 0.0;
  std::size_t steps = 0;       // tau * steps = 1
  double stability_number = 0; // max kappa^2 * tau * 2d / h^2, must be <= 1
};

/// Validates the grid and the explicit-scheme bound; throws StabilityViolation.
HeatGrid resolve_heat_grid(const HeatSetup& setup);

/// kappa^2 sampled at the interior nodes.
std::vector<double> heat_kappa_squared(const HeatSetup& setup, const HeatGrid& grid);

/// sin(2 pi x1) sin^2(2 pi x2) sin^3(2 pi x3) in 3-D, sin(pi x) in 1-D.
double heat_exact_value(int dimension, std::span<const double> x);

class HeatPropagator final : public LinearMap {
 public:
  HeatPropagator(SpacePtr space, int dimension, HeatGrid grid, std::vector<double> kappa2);
  void apply(std::span<const double> in, std::span<double> out) const override;
  void apply_adjoint(std::span<const double> in, std::span<double> out) const override;
  const HeatGrid& grid() const noexcept { return grid_; }

 private:
  void laplacian(const double* u, double* out) const;
  int dimension_;
  HeatGrid grid_;
  std::vector<double> kappa2_;
};

PdeProblem make_heat_problem(const HeatSetup& setup);

// ---------------------------------------------------------------------------
// Thermoacoustics: u_tt = Lap u on the unit square, u(., 0) = q, u_t(., 0) = 0,
// zero Neumann boundaries, t in [0, 1]. Leapfrog on the (n+1)^2 node grid with
// ghost-node reflection; traces are recorded at every time level.

enum class Face { Left, Right, Top };  // x = 0, x = 1, y = 1
const char* to_string(Face face);

struct ThermoacousticSetup {
  double h = 0.02;
  double tau = 0.002;
  /// Value of the constant default start field.
  double start_value = 0.0;
};

struct WaveGrid {
  std::size_t cells = 0;
  double h = 0.0;
  double tau = 0.0;
  std::size_t steps = 0;
};

/// Validates unit extents and the CFL bound tau / h <= 1/sqrt(2).
WaveGrid resolve_wave_grid(const ThermoacousticSetup& setup);

/// 0.1 + (1 + cos 8 pi x)(1 + cos 8 pi y) / 32 inside the four bump squares, 0.1 elsewhere.
double thermoacoustic_exact_value(double x, double y);

class WaveTraceMap final : public LinearMap {
 public:
  WaveTraceMap(SpacePtr domain, SpacePtr codomain, WaveGrid grid, Face face);
  void apply(std::span<const double> in, std::span<double> out) const override;
  void apply_adjoint(std::span<const double> in, std::span<double> out) const override;

  /// psi_t(., 0) of the backward wave problem with zero final data and Neumann
  /// flux p on the observed face (the continuous adjoint, discretized by the
  /// same leapfrog). Differs from apply_adjoint only through the end weight of
  /// the last time level, so the two coincide for traces vanishing at t = 1.
  std::vector<double> continuous_adjoint(std::span<const double> p) const;

  Face face() const noexcept { return face_; }
  const WaveGrid& grid() const noexcept { return grid_; }

 private:
  void laplacian(const double* u, double* out) const;
  std::size_t face_node(std::size_t k) const;
  WaveGrid grid_;
  Face face_;
  std::vector<double> time_weights_;
};

/// Three-term problem with data f_l = A_l q* generated by the same solver.
PdeProblem make_thermoacoustic_problem(const ThermoacousticSetup& setup);

}  // namespace minerr
