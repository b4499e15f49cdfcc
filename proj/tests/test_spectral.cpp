#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <vector>

#include "minerr/optimizers.hpp"
#include "minerr/spectral.hpp"

using namespace minerr;
using Real = boost::multiprecision::cpp_bin_float_50;

namespace {

double helmholtz_reference(double kappa, int n) {
  const Real pi = boost::math::constants::pi<Real>();
  const Real omega = sqrt(pi * pi * n * n - Real(kappa) * kappa);
  const Real c = cosh(omega);
  return static_cast<double>(1 / (c * c));
}

double heat_reference(double kappa, int n) {
  const Real pi = boost::math::constants::pi<Real>();
  return static_cast<double>(exp(-2 * pi * pi * Real(kappa) * kappa * n * n));
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("Helmholtz eigenvalues against 50-digit evaluation") {
  for (double kappa : {0.0, 1.0, 2.5}) {
    const Spectrum s = make_helmholtz_spectrum(kappa, 20);
    REQUIRE(s.size() == 20);
    for (int n = 1; n <= 20; ++n) {
      INFO("kappa " << kappa << " n " << n);
      CHECK(rel(s[n - 1], helmholtz_reference(kappa, n)) <= 1e-14);
    }
  }
  const Spectrum s0 = make_helmholtz_spectrum(0.0, 3);
  CHECK(rel(s0[2], 1.0 / std::pow(std::cosh(3 * M_PI), 2)) <= 1e-14);
  CHECK(rel(make_helmholtz_spectrum(1.0, 2)[0], 1.030368463493717e-2) <= 1e-14);
}

TEST_CASE("Helmholtz eigenvalue ratio approaches exp(-2 pi)") {
  const Spectrum s = make_helmholtz_spectrum(1.0, 40);
  const double limit = std::exp(-2 * M_PI);
  for (std::size_t n = 6; n < 39; ++n) CHECK(rel(s[n] / s[n - 1], limit) <= 0.01);
}

TEST_CASE("Helmholtz spectrum drops underflowing modes") {
  const Spectrum s = make_helmholtz_spectrum(1.0, 200);
  CHECK(s.truncated());
  CHECK(s.requested_modes() == 200);
  CHECK(s.size() < 200);
  CHECK(s[s.size() - 1] >= std::numeric_limits<double>::min());
  CHECK_THROWS_AS(make_helmholtz_spectrum(M_PI, 10), Error);
}

TEST_CASE("heat eigenvalues") {
  for (double kappa : {0.5, 1.0}) {
    const Spectrum s = make_heat_spectrum(kappa, 5);
    for (int n = 1; n <= static_cast<int>(s.size()); ++n)
      CHECK(rel(s[n - 1], heat_reference(kappa, n)) <= 1e-14);
  }
  const Spectrum s = make_heat_spectrum(1.0, 5);
  CHECK(rel(s[0], 2.675287991074240e-9) <= 1e-14);
  for (std::size_t n = 1; n + 1 <= s.size() - 1; ++n) {
    const double expected = std::exp(-2 * M_PI * M_PI * (2.0 * n + 1));
    CHECK(rel(s[n] / s[n - 1], expected) <= 1e-13);
  }
  const Spectrum stiff = make_heat_spectrum(1.2, 4);
  for (std::size_t n = 0; n < stiff.size(); ++n) CHECK(stiff[n] < s[n]);
}

TEST_CASE("spectral gradient descent") {
  const Spectrum s = make_helmholtz_spectrum(1.0, 8);
  std::vector<double> xi{0.5, -0.3, 0.2, 0.1, 0.4, -0.2, 0.1, 0.3};
  const DiagonalProblem dp = make_diagonal_problem(s, xi);
  const auto d2 = run_gradient_descent_spectral(dp, 0.9 / s[0], 100);
  double sum = 0.0;
  for (double x : xi) sum += x * x;
  CHECK(d2[0] == doctest::Approx(sum).epsilon(1e-15));

  MethodConfig gd = MethodConfig::of(MethodKind::GradientDescentFixed, 100);
  gd.fixed_step = 0.9 / s[0];
  const RunRecord rec = run(dp.problem, dp.start, gd);
  for (int k = 0; k <= 100; ++k) {
    const double iterative = k < 100 ? *rec.per_step[k].distance_to_solution
                                     : *rec.final_state.distance_to_solution;
    CHECK(std::abs(iterative * iterative - d2[k]) <= 1e-12);
  }

  const DiagonalProblem single = make_diagonal_problem(Spectrum({0.5, 0.25}, "two"), {1.0, 0.0});
  CHECK(run_gradient_descent_spectral(single, 2.0, 1)[1] == 0.0);
  CHECK_THROWS_AS(run_gradient_descent_spectral(single, 2.5, 1), Error);
}

TEST_CASE("psi_min on a two-mode instance against a grid scan") {
  const Spectrum s({0.5, 0.25}, "two");
  const std::vector<double> xi{0.8, 0.6};
  const PsiMinimum pm = psi_min(s, xi, 1);

  double best = std::numeric_limits<double>::infinity();
  const int points = 1000000;
  for (int i = 0; i <= points; ++i) {
    const double eta = -10.0 + 20.0 * i / points;
    const double v = xi[0] * xi[0] * std::pow(1 + eta * 0.5, 2) +
                     xi[1] * xi[1] * std::pow(1 + eta * 0.25, 2);
    best = std::min(best, v);
  }
  CHECK(std::abs(pm.psi - best) <= 1e-6);
  CHECK(psi_value(s, xi, pm.eta) == doctest::Approx(pm.psi).epsilon(1e-12));
}

TEST_CASE("psi_min basic properties") {
  const Spectrum s = make_helmholtz_spectrum(1.0, 10);
  std::vector<double> head(10, 0.0);
  head[0] = 0.6;
  head[1] = 0.8;
  CHECK(psi_min(s, head, 2).psi <= 1e-10);

  const std::vector<double> xi{0.1, 0.2, 0.3, 0.1, 0.5, 0.2, 0.3, 0.4, 0.1, 0.2};
  double norm2 = 0.0;
  for (double x : xi) norm2 += x * x;
  for (std::size_t n = 1; n <= 4; ++n) CHECK(psi_min(s, xi, n).psi <= norm2);
}

TEST_CASE("adversarial point over the heat spectrum") {
  const Spectrum s = make_heat_spectrum(1.0, 50);
  const AdversarialCertificate c = adversarial_initial_point(s, 2, 0.5);
  CHECK(c.psi_min > 0.5);
  CHECK(std::abs(c.xi_norm - 1.0) <= 1e-12);
  CHECK(c.tail_mode > 2);

  const DiagonalProblem dp = make_diagonal_problem(s, c.xi);
  const RunRecord rec = run(dp.problem, dp.start, MethodConfig::mme(kInfiniteMoments, 2));
  CHECK(std::pow(*rec.final_state.distance_to_solution, 2) > 0.5);
}

TEST_CASE("adversarial point over the Helmholtz spectrum") {
  const Spectrum s = make_helmholtz_spectrum(1.0, 200);
  const AdversarialCertificate c = adversarial_initial_point(s, 1, 0.9);
  CHECK(c.psi_min > 0.9);
  CHECK(std::abs(c.xi_norm - 1.0) <= 1e-12);
  CHECK(c.head_threshold == doctest::Approx((1 + 3 * 0.9) / 4));

  // With the head annihilated, Psi tends to xi_M^2 = (1 + eps)/2 as M grows.
  const AdversarialCertificate wide = adversarial_initial_point(s, 2, 0.5);
  CHECK(wide.psi_at_head_zero > wide.head_threshold);
  CHECK(wide.psi_at_head_zero <= 0.75 + 1e-12);

  const Spectrum short_one = make_helmholtz_spectrum(1.0, 3);
  CHECK_THROWS_AS(adversarial_initial_point(short_one, 3, 0.5), Error);
}
