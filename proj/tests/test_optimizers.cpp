#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <memory>
#include <random>

#include "minerr/catalog.hpp"
#include "minerr/optimizers.hpp"

using namespace minerr;

namespace {

QuadraticProblem identity_problem(std::size_t dim) {
  auto space = uniform_space(dim, 1.0, "unit");
  std::vector<Term> terms;
  terms.push_back(Term{AffineOperator(std::make_shared<IdentityMap>(space)), Vector(space)});
  return QuadraticProblem(std::move(terms), Vector(space), 1.0, "identity");
}

// A0 = diag(1, 0.5), f = 0, q* = 0.
QuadraticProblem two_mode_problem() {
  auto space = uniform_space(2, 1.0, "unit");
  std::vector<Term> terms;
  terms.push_back(Term{AffineOperator(std::make_shared<DiagonalMap>(
                                          space, std::vector<double>{1.0, 0.5})),
                       Vector(space)});
  return QuadraticProblem(std::move(terms), Vector(space), 1.0, "two-mode");
}

// Solves B x = B q* densely, B assembled column by column from apply_normal.
Eigen::VectorXd direct_solution(const QuadraticProblem& p) {
  const std::size_t n = p.domain()->dim();
  Eigen::MatrixXd b(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    Vector e(p.domain());
    e[j] = 1.0;
    const Vector col = p.apply_normal(e);
    for (std::size_t i = 0; i < n; ++i) b(i, j) = col[i];
  }
  // -grad J(0) = B q* since grad J(q) = B (q - q*).
  const Vector g0 = p.gradient(Vector(p.domain()));
  Eigen::VectorXd rhs(n);
  for (std::size_t i = 0; i < n; ++i) rhs(i) = -g0[i];
  return b.fullPivLu().solve(rhs);
}

}  // namespace

TEST_CASE("Polyak step") {
  const QuadraticProblem id = identity_problem(2);
  const StepResult r = step_polyak(id, Vector(id.domain(), {2, 0}));
  CHECK(r.diag.functional == 2.0);
  CHECK(r.diag.alpha == 0.5);
  CHECK(r.q_next[0] == 1.0);
  CHECK(r.q_next[1] == 0.0);

  const StepResult at_solution = step_polyak(id, Vector(id.domain()));
  CHECK(at_solution.diag.functional == 0.0);
  CHECK(at_solution.outcome == StepOutcome::TargetReached);

  const QuadraticProblem p = two_mode_problem();
  const StepResult s = step_polyak(p, Vector(p.domain(), {1, 1}));
  CHECK(s.diag.functional == 0.625);
  const double a = 0.625 / 1.0625;
  CHECK(s.q_next[0] == doctest::Approx(1 - a).epsilon(1e-15));
  CHECK(s.q_next[1] == doctest::Approx(1 - 0.25 * a).epsilon(1e-15));
  CHECK(s.q_next[0] == doctest::Approx(0.4117647058823529).epsilon(1e-15));
  CHECK(s.q_next[1] == doctest::Approx(0.8529411764705882).epsilon(1e-15));
}

TEST_CASE("minimal-error step") {
  const QuadraticProblem id = identity_problem(3);
  const StepResult r = step_minimal_error(id, Vector(id.domain(), {0.3, -2, 5}));
  for (std::size_t i = 0; i < 3; ++i) CHECK(r.q_next[i] == doctest::Approx(0.0).epsilon(1e-15));

  const QuadraticProblem p = two_mode_problem();
  const Vector q(p.domain(), {1, 1});
  const StepResult s = step_minimal_error(p, q);
  CHECK(s.diag.alpha == doctest::Approx(1.25 / 1.0625).epsilon(1e-15));
  CHECK(p.distance_to_solution(s.q_next) < p.distance_to_solution(q));
}

TEST_CASE("distance decreases on every minimal-error step") {
  const BuiltProblem fam = make_random_spd_problem(8, 11);
  const QuadraticProblem& p = fam.pde.problem;
  Vector q = fam.pde.start;
  for (int k = 0; k < 20; ++k) {
    const StepResult s = step_minimal_error(p, q);
    CHECK(p.distance_to_solution(s.q_next) < p.distance_to_solution(q));
    q = s.q_next;
  }
}

TEST_CASE("MME with empty history is the minimal-error step") {
  const BuiltProblem fam = make_random_spd_problem(6, 2);
  const QuadraticProblem& p = fam.pde.problem;
  IterateState state(fam.pde.start);
  const StepResult mme = step_mme(p, state, 3);
  const StepResult me = step_minimal_error(p, fam.pde.start);
  for (std::size_t i = 0; i < mme.q_next.size(); ++i) CHECK(mme.q_next[i] == me.q_next[i]);
  CHECK(mme.diag.sin2_phi == 1.0);
}

TEST_CASE("MME(1) second step is orthogonal to the first") {
  const BuiltProblem fam = make_random_spd_problem(6, 4);
  const QuadraticProblem& p = fam.pde.problem;
  IterateState state(fam.pde.start);
  step_mme(p, state, 1);
  const Vector h0 = state.history.back().h;
  step_mme(p, state, 1);
  const Vector h1 = state.history.back().h;
  CHECK(std::abs(inner(h0, h1)) <= 1e-10 * norm(h0) * norm(h1));
}

TEST_CASE("MME(inf) finite termination agrees with a direct solve") {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const BuiltProblem fam = make_random_spd_problem(5, seed);
    const QuadraticProblem& p = fam.pde.problem;
    const RunRecord rec = run(p, fam.pde.start, MethodConfig::mme(kInfiniteMoments, 5));
    CHECK(*rec.final_state.distance_to_solution <= 1e-8);
    const Eigen::VectorXd x = direct_solution(p);
    for (std::size_t i = 0; i < 5; ++i) CHECK(rec.final_q[i] == doctest::Approx(x(i)).epsilon(1e-7));
  }
}

TEST_CASE("run loop bookkeeping") {
  const QuadraticProblem id = identity_problem(3);
  const Vector q0(id.domain(), {1, 2, 3});
  CHECK_THROWS_AS(MethodConfig::minimal_error(0).validate(), Error);

  const RunRecord one = run(two_mode_problem(), Vector(two_mode_problem().domain(), {1, 1}),
                            MethodConfig::minimal_error(1));
  CHECK(one.per_step.size() == 1);
  CHECK(one.final_state.k == 1);

  const RunRecord rec = run(id, q0, MethodConfig::minimal_error(10));
  CHECK(rec.stop_reason == StopReason::TargetReached);
  CHECK(rec.final_state.k == 1);
}

TEST_CASE("MME(1) on the Helmholtz desk problem") {
  const BuiltProblem fam = build_problem("helmholtz", {}, 1);
  const RunRecord mme1 = run(fam.pde.problem, fam.pde.start, MethodConfig::mme(1, 100));
  const double d = *mme1.final_state.distance_to_solution;
  CHECK(d <= 5 * 6.14e-4);
  CHECK(d >= 6.14e-4 / 5);
}

TEST_CASE("exact line search") {
  const QuadraticProblem id = identity_problem(2);
  const Vector q(id.domain(), {0.7, -1.2});
  CHECK(exact_line_search_alpha(id, q, -1.0 * id.gradient(q)) == doctest::Approx(1.0));

  const QuadraticProblem p = two_mode_problem();
  const Vector q2(p.domain(), {1, 1});
  const Vector s = -1.0 * p.gradient(q2);
  const double a = exact_line_search_alpha(p, q2, s);
  CHECK(a == doctest::Approx(1.0625 / 1.015625).epsilon(1e-15));

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  Vector best = q2;
  best.axpy(a, s);
  const double jbest = p.functional(best);
  for (int i = 0; i < 100; ++i) {
    Vector probe = q2;
    probe.axpy(u(rng), s);
    CHECK(jbest <= p.functional(probe));
  }
}

TEST_CASE("baselines solve the identity problem") {
  const QuadraticProblem id = identity_problem(4);
  const Vector q0(id.domain(), {1, -2, 0.5, 3});
  for (MethodKind k : {MethodKind::Polyak, MethodKind::GradientDescentFixed,
                       MethodKind::HeavyBallAdaptive, MethodKind::ConjugateGradientFR,
                       MethodKind::ConjugateGradientPR, MethodKind::ConjugateGradientOrtho,
                       MethodKind::SimilarTriangles}) {
    const RunRecord rec = run(id, q0, MethodConfig::of(k, 50));
    INFO(method_name(rec.config));
    CHECK(*rec.final_state.distance_to_solution <= 1e-8);
  }
}

TEST_CASE("conjugate gradients terminate on a 10-dim SPD problem") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const BuiltProblem fam = make_random_spd_problem(10, seed, 0.1);
    const QuadraticProblem& p = fam.pde.problem;
    const double j0 = p.functional(fam.pde.start);
    const Eigen::VectorXd x = direct_solution(p);
    for (MethodKind k : {MethodKind::ConjugateGradientFR, MethodKind::ConjugateGradientPR}) {
      const RunRecord rec = run(p, fam.pde.start, MethodConfig::of(k, 10));
      INFO(method_name(rec.config) << " seed " << seed);
      CHECK(rec.final_state.functional <= 1e-16 * j0);
      double err = 0.0;
      for (std::size_t i = 0; i < 10; ++i) err = std::max(err, std::abs(rec.final_q[i] - x(i)));
      CHECK(err <= 1e-6);
    }
  }
}

TEST_CASE("method names round-trip") {
  for (const std::string& name : known_method_names()) {
    if (name.find('<') != std::string::npos) continue;
    const auto cfg = parse_method(name);
    REQUIRE(cfg.has_value());
    CHECK(method_name(*cfg) == name);
  }
  CHECK(method_name(*parse_method("mme:7")) == "mme7");
  CHECK(method_name(*parse_method("mme0")) == "minimal_error");
  CHECK_FALSE(parse_method("mme:x").has_value());
  CHECK_FALSE(parse_method("newton").has_value());
}
