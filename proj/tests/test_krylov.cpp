#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <memory>

#include "minerr/catalog.hpp"
#include "minerr/krylov.hpp"
#include "minerr/optimizers.hpp"

using namespace minerr;

namespace {

QuadraticProblem identity_problem(std::size_t dim) {
  auto space = uniform_space(dim, 1.0, "unit");
  std::vector<Term> terms;
  terms.push_back(Term{AffineOperator(std::make_shared<IdentityMap>(space)), Vector(space)});
  return QuadraticProblem(std::move(terms), Vector(space), 1.0, "identity");
}

double orthonormality_defect(const KrylovBasis& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < b.vectors.size(); ++i)
    for (std::size_t j = 0; j < b.vectors.size(); ++j)
      worst = std::max(worst, std::abs(inner(b.vectors[i], b.vectors[j]) - (i == j ? 1.0 : 0.0)));
  return worst;
}

}  // namespace

TEST_CASE("identity operator gives a one-dimensional Krylov space") {
  const QuadraticProblem id = identity_problem(4);
  const Vector q0(id.domain(), {1, 2, 3, 4});
  const KrylovBasis b = build_krylov_basis(id, q0, 4);
  CHECK(b.effective_dim == 1);
  CHECK(b.invariant);
  CHECK(optimal_krylov_distance(q0, *id.exact_solution(), b) <= 1e-15);

  const Theorem1Report t = verify_theorem1(id, q0, *id.exact_solution(), 1, 1e-6);
  REQUIRE(t.steps.size() == 1);
  CHECK(t.steps[0].method_distance <= 1e-15);
  CHECK(t.steps[0].oracle_distance <= 1e-15);
}

TEST_CASE("distinct eigenvalues give a full Krylov space") {
  const BuiltProblem fam = make_random_diagonal_problem(8, 4);
  const QuadraticProblem& p = fam.pde.problem;
  const KrylovBasis b = build_krylov_basis(p, fam.pde.start, 8);
  CHECK(b.effective_dim == 8);
  CHECK(orthonormality_defect(b) <= 1e-10);

  // Independent rank check on the raw Krylov sequence.
  Eigen::MatrixXd raw(8, 8);
  Vector v = p.gradient(fam.pde.start);
  for (int j = 0; j < 8; ++j) {
    for (int i = 0; i < 8; ++i) raw(i, j) = v[i];
    v = p.apply_normal(v);
  }
  Eigen::FullPivHouseholderQR<Eigen::MatrixXd> qr(raw);
  qr.setThreshold(1e-14);
  CHECK(qr.rank() == 8);
  CHECK(optimal_krylov_distance(fam.pde.start, *p.exact_solution(), b) <= 1e-10);
}

TEST_CASE("zero gradient leaves the start distance") {
  const QuadraticProblem id = identity_problem(3);
  const Vector q_star = *id.exact_solution();
  const KrylovBasis b = build_krylov_basis(id, q_star, 2);
  CHECK(b.effective_dim == 0);
  const Vector q0(id.domain(), {0, 0, 0});
  CHECK(optimal_krylov_distance(q0, q_star, b) == 0.0);
}

TEST_CASE("oracle distance against dense least squares on raw Krylov vectors") {
  const BuiltProblem fam = make_random_diagonal_problem(10, 7);
  const QuadraticProblem& p = fam.pde.problem;
  const Vector& q0 = fam.pde.start;
  const Vector& q_star = *p.exact_solution();
  const int n = 4;
  const KrylovBasis b = build_krylov_basis(p, q0, n);

  Eigen::MatrixXd v(10, n);
  Vector col = p.gradient(q0);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < 10; ++i) v(i, j) = col[i];
    col = p.apply_normal(col);
  }
  Eigen::VectorXd rhs(10);
  for (int i = 0; i < 10; ++i) rhs(i) = q_star[i] - q0[i];
  const Eigen::VectorXd c = v.colPivHouseholderQr().solve(rhs);
  const double dense = (v * c - rhs).norm();
  CHECK(optimal_krylov_distance(q0, q_star, b) == doctest::Approx(dense).epsilon(1e-8));
}

TEST_CASE("MME(inf) attains the Krylov optimum") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const BuiltProblem fam = make_random_diagonal_problem(10, seed);
    const QuadraticProblem& p = fam.pde.problem;
    const Theorem1Report t = verify_theorem1(p, fam.pde.start, *p.exact_solution(), 10, 1e-6);
    CHECK(t.passed);
  }
  const BuiltProblem helm = build_problem("helmholtz", {{"modes", "20"}}, 1);
  const QuadraticProblem& p = helm.pde.problem;
  const Theorem1Report t = verify_theorem1(p, helm.pde.start, *p.exact_solution(), 15, 1e-6);
  CHECK(t.passed);
  CHECK(t.completed_steps >= 4);
}

TEST_CASE("no Krylov method beats the oracle") {
  const BuiltProblem fam = make_random_spd_problem(9, 2);
  const QuadraticProblem& p = fam.pde.problem;
  const Vector& q0 = fam.pde.start;
  KrylovBasis b = build_krylov_basis(p, q0, 1);
  std::vector<double> oracle{norm(q0 - *p.exact_solution())};
  for (int n = 1; n <= 9; ++n) {
    if (n > 1) extend_krylov_basis(p, b);
    oracle.push_back(optimal_krylov_distance(q0, *p.exact_solution(), b));
  }
  for (MethodKind k : {MethodKind::Polyak, MethodKind::ConjugateGradientFR,
                       MethodKind::SimilarTriangles, MethodKind::HeavyBallAdaptive}) {
    const RunRecord rec = run(p, q0, MethodConfig::of(k, 9));
    for (std::size_t i = 0; i < rec.per_step.size(); ++i)
      CHECK(*rec.per_step[i].distance_to_solution >= oracle[i] - 1e-9);
  }
}
