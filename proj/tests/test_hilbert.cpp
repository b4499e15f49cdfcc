#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <memory>
#include <random>

#include "minerr/catalog.hpp"
#include "minerr/hilbert.hpp"
#include "minerr/pde.hpp"
#include "minerr/spectral.hpp"

using namespace minerr;

namespace {

QuadraticProblem identity_problem(std::size_t dim) {
  auto space = uniform_space(dim, 1.0, "unit");
  std::vector<Term> terms;
  terms.push_back(Term{AffineOperator(std::make_shared<IdentityMap>(space)), Vector(space)});
  return QuadraticProblem(std::move(terms), Vector(space), 1.0, "identity");
}

QuadraticProblem diagonal_problem(std::vector<double> diag) {
  auto space = uniform_space(diag.size(), 1.0, "unit");
  std::vector<Term> terms;
  terms.push_back(
      Term{AffineOperator(std::make_shared<DiagonalMap>(space, std::move(diag))), Vector(space)});
  return QuadraticProblem(std::move(terms), Vector(space), std::nullopt, "diag");
}

}  // namespace

TEST_CASE("weighted inner product") {
  auto unit = uniform_space(2, 1.0, "unit");
  CHECK(inner(Vector(unit, {1, 2}), Vector(unit, {3, 4})) == 11.0);
  CHECK(inner(Vector(unit, {5, -7}), Vector(unit)) == 0.0);

  auto trap = make_space(trapezoid_weights(2, 1.0), "trap");
  CHECK(trap->weights()[0] == 0.5);
  CHECK(inner(Vector(trap, {1, 1, 1}), Vector(trap, {1, 1, 1})) == 2.0);
}

TEST_CASE("tensor weights are products of axis weights") {
  const auto w = tensor_weights({trapezoid_weights(2, 0.5), trapezoid_weights(1, 2.0)});
  REQUIRE(w.size() == 6);
  CHECK(w[0] == doctest::Approx(0.25 * 1.0));
  CHECK(w[3] == doctest::Approx(0.5 * 1.0));
  double sum = 0.0;
  for (double v : w) sum += v;
  CHECK(sum == doctest::Approx(2.0));  // area of [0,1] x [0,2]
}

TEST_CASE("mismatched spaces are rejected") {
  auto a = uniform_space(3, 1.0, "a");
  auto b = uniform_space(4, 1.0, "b");
  CHECK_THROWS_AS(inner(Vector(a), Vector(b)), Error);
  try {
    inner(Vector(a), Vector(b));
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DimensionMismatch);
  }
}

TEST_CASE("functional values") {
  const QuadraticProblem id = identity_problem(2);
  auto space = id.domain();
  CHECK(id.functional(Vector(space, {3, 4})) == 12.5);
  CHECK(id.functional(*id.exact_solution()) == 0.0);

  const BuiltProblem helm = build_problem("helmholtz", {}, 1);
  const double j0 = helm.pde.problem.functional(helm.pde.start);
  CHECK(j0 > 1.77e-4 / 2);
  CHECK(j0 < 1.77e-4 * 2);
  CHECK(helm.pde.problem.functional(*helm.pde.problem.exact_solution()) <= 1e-20 * j0);
}

TEST_CASE("gradient of the 2-D diagonal instance") {
  const QuadraticProblem p = diagonal_problem({1.0, 0.5});
  const Vector g = p.gradient(Vector(p.domain(), {1, 1}));
  CHECK(g[0] == 1.0);
  CHECK(g[1] == 0.25);
  const Vector at_solution = p.gradient(*p.exact_solution());
  CHECK(norm(at_solution) == 0.0);
}

TEST_CASE("gradient matches central finite differences") {
  const BuiltProblem fam = make_random_spd_problem(6, 3);
  const QuadraticProblem& p = fam.pde.problem;
  Vector q = fam.pde.start;
  const Vector g = p.gradient(q);
  const auto w = p.domain()->weights();
  const double step = 1e-5;
  double worst = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    Vector plus = q, minus = q;
    plus[i] += step;
    minus[i] -= step;
    // The weighted gradient satisfies dJ/dq_i = w_i g_i.
    const double fd = (p.functional(plus) - p.functional(minus)) / (2 * step);
    worst = std::max(worst, std::abs(fd - w[i] * g[i]) / std::max(1e-12, std::abs(w[i] * g[i])));
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("finite differences on a weighted PDE space") {
  const BuiltProblem fam = build_problem("heat1d", {{"h", "0.1"}}, 1);
  const QuadraticProblem& p = fam.pde.problem;
  Vector q = random_unit_vector(p.domain(), 5);
  const Vector g = p.gradient(q);
  const auto w = p.domain()->weights();
  double worst = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) scale = std::max(scale, std::abs(w[i] * g[i]));
  for (std::size_t i = 0; i < q.size(); ++i) {
    Vector plus = q, minus = q;
    plus[i] += 1e-5;
    minus[i] -= 1e-5;
    const double fd = (p.functional(plus) - p.functional(minus)) / 2e-5;
    worst = std::max(worst, std::abs(fd - w[i] * g[i]) / scale);
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("adjoint probes") {
  auto space = uniform_space(5, 1.0, "unit");
  CHECK(verify_adjoint(AffineOperator(std::make_shared<IdentityMap>(space)), 10, 1e-15).max_defect ==
        0.0);
  const AdjointReport diag = verify_adjoint(
      AffineOperator(std::make_shared<DiagonalMap>(space, std::vector<double>{3, 2, 1, 0.5, 0.1})),
      20, 1e-15);
  CHECK(diag.max_defect <= 1e-15);
  CHECK(diag.passed);

  // Dense map between weighted spaces: adjoint is W^-1 M^T W.
  auto dom = make_space({0.5, 1.0, 2.0}, "dom");
  auto cod = make_space({0.25, 4.0}, "cod");
  const AdjointReport dense = verify_adjoint(
      AffineOperator(std::make_shared<DenseMap>(dom, cod, std::vector<double>{1, 2, 3, -1, 0.5, 7})),
      20, 1e-14);
  CHECK(dense.passed);
}

TEST_CASE("thermoacoustic operator on a 50x50 grid is an exact transpose") {
  ThermoacousticSetup setup;
  setup.h = 0.02;
  setup.tau = 0.01;
  const PdeProblem p = make_thermoacoustic_problem(setup);
  REQUIRE(p.problem.terms().size() == 3);
  const AdjointReport r = verify_adjoint(p.problem.terms()[0].op, 5, 1e-10);
  CHECK(r.max_defect <= 1e-10);
}

TEST_CASE("power iteration") {
  const QuadraticProblem p = diagonal_problem({2.0, 1.0});
  CHECK(estimate_operator_norm(p, 100) == doctest::Approx(4.0).epsilon(1e-6));
  CHECK(estimate_operator_norm(identity_problem(4), 1) == doctest::Approx(1.0).epsilon(1e-15));

  const DiagonalProblem helm = make_diagonal_problem(make_helmholtz_spectrum(1.0, 20),
                                                     std::vector<double>(20, 0.1));
  const double lambda1 = 1.0 / std::pow(std::cosh(std::sqrt(M_PI * M_PI - 1.0)), 2);
  CHECK(estimate_operator_norm(helm.problem, 100) == doctest::Approx(lambda1).epsilon(1e-10));
}

TEST_CASE("unit random vectors are deterministic") {
  auto space = make_space(trapezoid_weights(10, 0.1), "trap");
  const Vector a = random_unit_vector(space, 9), b = random_unit_vector(space, 9);
  CHECK(norm(a) == doctest::Approx(1.0).epsilon(1e-14));
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}
