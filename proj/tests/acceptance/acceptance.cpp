// Acceptance run: one PASS/FAIL line per criterion, INFO lines for context.
// Usage: acceptance <path to minerr_bench> [--strict]
// With --strict the exit code is nonzero when any criterion fails.

#include <algorithm>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "minerr/catalog.hpp"
#include "minerr/optimizers.hpp"
#include "minerr/spectral.hpp"
#include "minerr/suites.hpp"

using namespace minerr;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int id, bool pass, const std::string& what, const std::string& detail) {
  if (!pass) ++failures;
  std::cout << (pass ? "PASS" : "FAIL") << "  " << id << ". " << what << " | " << detail
            << std::endl;
}

void info(const std::string& text) { std::cout << "INFO  " << text << std::endl; }

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string sci(double v) {
  std::ostringstream s;
  s.precision(4);
  s << v;
  return s.str();
}

// Suite criterion: every check passes; the worst failing check is named.
void suite_criterion(int id, const std::string& suite, const std::string& what,
                     double time_limit = 0.0) {
  const auto t0 = Clock::now();
  const SuiteReport r = run_suite(suite, 1);
  const double t = seconds_since(t0);
  std::size_t failed = 0;
  std::string first;
  for (const Check& c : r.checks)
    if (!c.passed && failed++ == 0)
      first = c.problem + " / " + c.name + " measured " + sci(c.measured) + " > " + sci(c.threshold);
  bool pass = r.passed();
  std::ostringstream d;
  d << r.checks.size() - failed << "/" << r.checks.size() << " checks, " << sci(t) << " s";
  if (time_limit > 0.0) {
    d << " (limit " << time_limit << " s)";
    pass = pass && t < time_limit;
  }
  if (failed) d << "; first failure: " << first;
  report(id, pass, what, d.str());
}

bool within_factor(double value, double reference, double factor) {
  return value >= reference / factor && value <= reference * factor;
}

// Largest increase of the distance between consecutive iterates.
double worst_distance_increase(const RunRecord& rec) {
  std::vector<double> d;
  for (const auto& s : rec.per_step) d.push_back(*s.distance_to_solution);
  d.push_back(*rec.final_state.distance_to_solution);
  double worst = 0.0;
  for (std::size_t k = 1; k < d.size(); ++k) worst = std::max(worst, d[k] - d[k - 1]);
  return worst;
}

// ---------------------------------------------------------------------------

void criterion9() {
  bool pass = true;
  double worst = 0.0;
  for (std::size_t n : {5u, 10u, 15u})
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const BuiltProblem fam = make_random_spd_problem(n, seed);
      const RunRecord rec = run(fam.pde.problem, fam.pde.start,
                                MethodConfig::mme(kInfiniteMoments, static_cast<int>(n)));
      const double d = *rec.final_state.distance_to_solution;
      worst = std::max(worst, d);
      pass = pass && d <= 1e-8 && rec.final_state.k <= static_cast<int>(n);
    }
  report(9, pass, "finite termination of MME(inf) on random SPD, n in {5,10,15}, 5 seeds",
         "worst ||q_n - q*|| = " + sci(worst) + " (<= 1e-8)");
}

void criterion10() {
  const auto t0 = Clock::now();
  const BuiltProblem fam = build_problem("helmholtz", {{"modes", "200"}}, 1);
  const QuadraticProblem& p = fam.pde.problem;
  const double j0 = p.functional(fam.pde.start);
  const RunRecord mme1 = run(p, fam.pde.start, MethodConfig::mme(1, 100));
  const RunRecord cg = run(p, fam.pde.start, MethodConfig::of(MethodKind::ConjugateGradientFR, 100));
  const double t = seconds_since(t0);
  const double d_mme = *mme1.final_state.distance_to_solution;
  const double d_cg = *cg.final_state.distance_to_solution;
  const bool pass = within_factor(j0, 1.77e-4, 2.0) && d_mme <= 5e-3 && d_mme <= d_cg && t < 120;
  std::ostringstream d;
  d.precision(8);
  d << "J(q0) = " << j0 << " (1.77e-4 x/ 2); MME(1) " << d_mme << " after " << mme1.final_state.k
    << " steps (" << to_string(mme1.stop_reason) << ") vs CG-FR " << d_cg << "; " << sci(t) << " s";
  report(10, pass, "Helmholtz desk experiment", d.str());
  for (const char* name : {"cg_ortho", "minimal_error", "polyak"}) {
    const RunRecord r = run(p, fam.pde.start, *parse_method(name));
    info(std::string("helmholtz ") + name + " final distance " +
         sci(*r.final_state.distance_to_solution));
  }
}

void criterion11() {
  const auto t0 = Clock::now();
  const BuiltProblem fam = build_problem("heat3d", {{"h", "0.04"}, {"kappa_max", "0.4"}}, 1);
  const QuadraticProblem& p = fam.pde.problem;
  const double j0 = p.functional(fam.pde.start);
  bool monotone = true;
  double worst_rise = 0.0, d_inf = 0.0, d_one = 0.0;
  std::ostringstream finals;
  for (const char* name : {"minimal_error", "mme1", "mme2", "mme5", "mme_inf"}) {
    const RunRecord r = run(p, fam.pde.start, *parse_method(name));
    const double rise = worst_distance_increase(r);
    worst_rise = std::max(worst_rise, rise);
    monotone = monotone && rise <= 1e-12;
    const double d = *r.final_state.distance_to_solution;
    if (std::string(name) == "mme1") d_one = d;
    if (std::string(name) == "mme_inf") d_inf = d;
    finals << " " << name << "=" << sci(d);
  }
  const double t = seconds_since(t0);
  const bool pass = within_factor(j0, 6.27e-3, 3.0) && monotone && d_inf <= d_one + 1e-12 && t < 600;
  report(11, pass, "heat-3D desk experiment on the h=0.04 grid",
         "J(q0) = " + sci(j0) + " (6.27e-3 x/ 3); largest distance rise " + sci(worst_rise) +
             "; final distances" + finals.str() + "; " + sci(t) + " s");
}

void criterion12() {
  const auto t0 = Clock::now();
  const BuiltProblem fam =
      build_problem("thermoacoustic", {{"h", "0.02"}, {"tau", "0.002"}, {"q0", "0"}}, 1);
  const QuadraticProblem& p = fam.pde.problem;
  const double j0 = p.functional(fam.pde.start);
  const double d0 = p.distance_to_solution(fam.pde.start);
  const RunRecord r = run(p, fam.pde.start, MethodConfig::mme(5, 300));
  const double t = seconds_since(t0);
  const double d = *r.final_state.distance_to_solution;
  const double rise = worst_distance_increase(r);
  const bool pass = within_factor(j0, 0.018, 2.0) && within_factor(d0, 0.11, 2.0) && d <= 1e-3 &&
                    rise <= 1e-12 && t < 900;
  report(12, pass, "thermoacoustic desk experiment, h=0.02, tau=0.002, q0=0",
         "J(q0) = " + sci(j0) + " (0.018 x/ 2); ||q0-q*|| = " + sci(d0) +
             " (0.11 x/ 2); MME(5) 300 steps final " + sci(d) + " (<= 1e-3); largest rise " +
             sci(rise) + "; " + sci(t) + " s");

  const BuiltProblem shifted =
      build_problem("thermoacoustic", {{"h", "0.02"}, {"tau", "0.002"}, {"q0", "0.1"}}, 1);
  const QuadraticProblem& ps = shifted.pde.problem;
  const RunRecord rs = run(ps, shifted.pde.start, MethodConfig::mme(5, 300));
  info("thermoacoustic with q0 = 0.1: J(q0) = " + sci(ps.functional(shifted.pde.start)) +
       ", ||q0-q*|| = " + sci(ps.distance_to_solution(shifted.pde.start)) +
       ", MME(5) final " + sci(*rs.final_state.distance_to_solution) + ", largest rise " +
       sci(worst_distance_increase(rs)));
}

void criterion13() {
  using Real = boost::multiprecision::cpp_bin_float_50;
  const Real pi = boost::math::constants::pi<Real>();
  double worst = 0.0;
  for (double kappa : {0.0, 0.5, 1.0, 2.0}) {
    const Spectrum s = make_helmholtz_spectrum(kappa, 20);
    for (int n = 1; n <= 20; ++n) {
      const Real c = cosh(sqrt(pi * pi * n * n - Real(kappa) * kappa));
      const double ref = static_cast<double>(1 / (c * c));
      worst = std::max(worst, std::abs(s[n - 1] - ref) / ref);
    }
  }
  for (double kappa : {0.1, 0.5, 1.0}) {
    const Spectrum s = make_heat_spectrum(kappa, 20);
    for (int n = 1; n <= static_cast<int>(s.size()); ++n) {
      const double ref = static_cast<double>(exp(-2 * pi * pi * Real(kappa) * kappa * n * n));
      worst = std::max(worst, std::abs(s[n - 1] - ref) / ref);
    }
  }
  report(13, worst <= 1e-14, "spectral closed forms against 50-digit evaluation, n <= 20",
         "worst relative error " + sci(worst) + " (<= 1e-14)");
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

void criterion14(const std::string& bench) {
  const fs::path dir = fs::temp_directory_path() / "minerr_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const fs::path cfg = dir / "experiment.ini";
  std::ofstream(cfg) << "[problem]\nname = diagonal\ndim = 12\n\n[run]\n"
                        "methods = minimal_error, mme1, mme5, mme_inf, polyak, gd, heavy_ball, "
                        "cg_fr, cg_pr, cg_ortho, stm\nbudget = 40\nseed = 17\n";
  bool pass = true;
  std::size_t compared = 0;
  for (const char* out : {"a", "b"}) {
    const std::string cmd = "\"" + bench + "\" run --config \"" + cfg.string() + "\" --out \"" +
                            (dir / out).string() + "\" > /dev/null";
    pass = pass && std::system(cmd.c_str()) == 0;
  }
  if (pass) {
    for (const auto& e : fs::directory_iterator(dir / "a")) {
      const fs::path twin = dir / "b" / e.path().filename();
      pass = pass && fs::exists(twin) && slurp(e.path()) == slurp(twin);
      ++compared;
    }
    pass = pass && compared > 0;
  }
  report(14, pass, "repeated CLI runs with a fixed seed give byte-identical files",
         std::to_string(compared) + " files compared");
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: acceptance <minerr_bench> [--strict]\n";
    return 2;
  }
  const std::string bench = argv[1];
  const bool strict = argc > 2 && std::string(argv[2]) == "--strict";

  const std::vector<std::function<void()>> criteria{
      [] { suite_criterion(1, "adjoint", "adjoint exactness, 20 probes per operator", 60.0); },
      [] { suite_criterion(2, "identity2J", "<q - q*, grad J> = 2J at 20 points per family"); },
      [] { suite_criterion(3, "lemma1", "MME(m) step orthogonality, m in {1,2,5}"); },
      [] { suite_criterion(4, "telescoping", "telescoping identity for the minimal-error family"); },
      [] { suite_criterion(5, "theorem1", "MME(inf) attains the Krylov optimum"); },
      [] { suite_criterion(6, "theorem4", "J <= L/2 |h|^2 sin^2 phi + 1e-12 on every step"); },
      [] { suite_criterion(7, "theorem5", "contraction bounds on diagonal models"); },
      [] { suite_criterion(8, "theorem6", "slow-convergence start points", 60.0); },
      criterion9,
      criterion10,
      criterion11,
      criterion12,
      criterion13,
      [&] { criterion14(bench); },
  };
  for (const auto& c : criteria) {
    try {
      c();
    } catch (const std::exception& e) {
      ++failures;
      std::cout << "FAIL  criterion raised: " << e.what() << std::endl;
    }
  }
  std::cout << (criteria.size() - failures) << "/" << criteria.size() << " criteria pass"
            << std::endl;
  return strict && failures > 0 ? 1 : 0;
}
