#include "minerr/catalog.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

namespace minerr {

const std::vector<ProblemInfo>& problem_catalog() {
  static const std::vector<ProblemInfo> catalog{
      {"helmholtz",
       "Helmholtz boundary continuation in sine-mode space, f = 0, q* = y - y^2",
       {{"kappa", "1", "wave number, 0 <= kappa < pi"}, {"modes", "200", "number of sine modes"}}},
      {"heat1d",
       "retrospective heat problem on (0,1), constant kappa, q* = sin(pi x)",
       {{"h", "0.02", "grid step"},
        {"tau", "", "time step (default: stable 1/n_t <= 1e-3)"},
        {"kappa", "1", "conductivity"},
        {"lipschitz_iterations", "30", "power iterations for L"}}},
      {"heat3d",
       "retrospective heat problem on the unit cube with piecewise kappa",
       {{"h", "0.04", "grid step"},
        {"tau", "", "time step (default: stable 1/n_t <= 1e-3)"},
        {"kappa_max", "0.4", "kappa inside (0.4,0.6)^3; kappa_max/5 outside"},
        {"lipschitz_iterations", "30", "power iterations for L"}}},
      {"thermoacoustic",
       "2-D wave equation, traces on x=0, x=1, y=1, four-bump q*",
       {{"h", "0.02", "grid step"},
        {"tau", "0.002", "time step"},
        {"q0", "0", "constant value of the start field"},
        {"lipschitz_iterations", "100", "power iterations for L"}}},
      {"diagonal",
       "diagonal model B = diag(lambda), q* = 0, q0 = xi",
       {{"dim", "10", "number of modes"},
        {"spectrum", "random", "random | helmholtz | heat"},
        {"kappa", "1", "spectrum parameter for helmholtz/heat"},
        {"mu", "0.01", "smallest eigenvalue (random)"},
        {"L", "1", "largest eigenvalue (random)"}}},
      {"adversarial",
       "diagonal model started from the slow-convergence point for N steps",
       {{"spectrum", "helmholtz", "helmholtz | heat"},
        {"kappa", "1", "spectrum parameter"},
        {"modes", "200", "modes requested"},
        {"N", "2", "step budget the point is built for"},
        {"epsilon", "0.5", "squared-distance floor, in (0,1)"}}},
  };
  return catalog;
}

namespace {

class Params {
 public:
  Params(const std::string& selector, const ParamMap& map) : selector_(selector), map_(map) {
    const auto& cat = problem_catalog();
    auto it = std::find_if(cat.begin(), cat.end(),
                           [&](const ProblemInfo& p) { return p.selector == selector; });
    if (it == cat.end()) fail(ErrorCode::InvalidArgument, "unknown problem '" + selector + "'");
    std::set<std::string> known;
    for (const auto& p : it->params) known.insert(p.key);
    for (const auto& [key, value] : map)
      if (!known.count(key))
        fail(ErrorCode::InvalidArgument,
             "problem '" + selector + "' has no parameter '" + key + "'");
  }

  std::optional<std::string> text(const std::string& key) const {
    auto it = map_.find(key);
    if (it == map_.end() || it->second.empty()) return std::nullopt;
    return it->second;
  }

  std::optional<double> real(const std::string& key) const {
    auto t = text(key);
    if (!t) return std::nullopt;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(t->data(), t->data() + t->size(), v);
    if (ec != std::errc{} || ptr != t->data() + t->size() || !std::isfinite(v))
      fail(ErrorCode::InvalidArgument, bad(key, *t, "a number"));
    return v;
  }

  double real(const std::string& key, double fallback) const {
    return real(key).value_or(fallback);
  }

  std::size_t count(const std::string& key, std::size_t fallback) const {
    auto t = text(key);
    if (!t) return fallback;
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(t->data(), t->data() + t->size(), v);
    if (ec != std::errc{} || ptr != t->data() + t->size())
      fail(ErrorCode::InvalidArgument, bad(key, *t, "a non-negative integer"));
    return v;
  }

 private:
  std::string bad(const std::string& key, const std::string& value, const char* want) const {
    return "problem '" + selector_ + "': parameter " + key + " = '" + value + "' is not " + want;
  }
  std::string selector_;
  const ParamMap& map_;
};

Spectrum named_spectrum(const std::string& name, double kappa, std::size_t modes) {
  if (name == "helmholtz") return make_helmholtz_spectrum(kappa, modes);
  if (name == "heat") return make_heat_spectrum(kappa, modes);
  fail(ErrorCode::InvalidArgument, "unknown spectrum '" + name + "' (helmholtz | heat)");
}

std::vector<double> log_uniform_spectrum(std::size_t dim, std::mt19937_64& rng, double mu,
                                         double lipschitz) {
  require(dim >= 2, ErrorCode::InvalidArgument, "random problems need dim >= 2");
  require(mu > 0.0 && lipschitz > mu, ErrorCode::InvalidArgument, "need 0 < mu < L");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> lam(dim);
  lam[0] = lipschitz;
  lam[dim - 1] = mu;
  const double span = std::log(lipschitz / mu);
  for (std::size_t i = 1; i + 1 < dim; ++i) lam[i] = mu * std::exp(span * unit(rng));
  std::sort(lam.begin(), lam.end(), std::greater<>());
  return lam;
}

std::vector<double> random_unit(std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  std::vector<double> v(dim);
  double s = 0.0;
  do {
    s = 0.0;
    for (double& x : v) {
      x = normal(rng);
      s += x * x;
    }
  } while (s == 0.0);
  for (double& x : v) x /= std::sqrt(s);
  return v;
}

BuiltProblem from_diagonal(std::string selector, const Spectrum& spectrum, std::vector<double> xi,
                           std::optional<double> mu) {
  DiagonalProblem dp = make_diagonal_problem(spectrum, std::move(xi));
  BuiltProblem out{std::move(selector),
                   PdeProblem{std::move(dp.problem), std::move(dp.start), {spectrum.size()}, 0.0},
                   mu, std::nullopt, {}};
  if (spectrum.truncated()) {
    std::ostringstream note;
    note << "spectrum " << spectrum.label() << " truncated to " << spectrum.size() << " of "
         << spectrum.requested_modes() << " modes (double-precision underflow)";
    out.notes.push_back(note.str());
  }
  return out;
}

}  // namespace

QuadraticProblem with_estimated_lipschitz(const QuadraticProblem& problem, int iterations,
                                          std::uint64_t seed) {
  const double l = estimate_operator_norm(problem, iterations, seed);
  std::vector<Term> terms(problem.terms().begin(), problem.terms().end());
  return QuadraticProblem(std::move(terms), problem.exact_solution(), l, problem.label());
}

BuiltProblem make_random_diagonal_problem(std::size_t dim, std::uint64_t seed, double mu,
                                          double lipschitz) {
  std::mt19937_64 rng(seed);
  Spectrum spectrum(log_uniform_spectrum(dim, rng, mu, lipschitz), "random-diagonal");
  return from_diagonal("diagonal", spectrum, random_unit(dim, rng), mu);
}

BuiltProblem make_random_spd_problem(std::size_t dim, std::uint64_t seed, double mu,
                                     double lipschitz) {
  std::mt19937_64 rng(seed);
  const auto lam = log_uniform_spectrum(dim, rng, mu, lipschitz);
  std::normal_distribution<double> normal;
  const auto n = static_cast<Eigen::Index>(dim);
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) g(i, j) = normal(rng);
  const Eigen::MatrixXd u = Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ();
  Eigen::VectorXd root(n);
  for (Eigen::Index i = 0; i < n; ++i) root(i) = std::sqrt(lam[static_cast<std::size_t>(i)]);
  const Eigen::MatrixXd a = u * root.asDiagonal() * u.transpose();

  std::vector<double> row_major(dim * dim);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) row_major[static_cast<std::size_t>(i * n + j)] = a(i, j);
  auto space = uniform_space(dim, 1.0, "random-spd");
  auto map = std::make_shared<DenseMap>(space, space, std::move(row_major));
  Vector q_star(space, random_unit(dim, rng));
  Vector start(space, random_unit(dim, rng));
  AffineOperator op(map);
  Vector data = op.apply(q_star);
  std::vector<Term> terms{Term{std::move(op), std::move(data)}};
  QuadraticProblem problem(std::move(terms), std::move(q_star), lipschitz, "random-spd");
  return BuiltProblem{"spd", PdeProblem{std::move(problem), std::move(start), {dim}, 0.0}, mu,
                      std::nullopt, {}};
}

BuiltProblem build_problem(const std::string& selector, const ParamMap& params,
                           std::uint64_t seed) {
  const Params p(selector, params);

  if (selector == "helmholtz") {
    HelmholtzSetup s;
    s.kappa = p.real("kappa", 1.0);
    s.n_modes = p.count("modes", 200);
    return BuiltProblem{selector, make_helmholtz_problem(s), std::nullopt, std::nullopt, {}};
  }

  if (selector == "heat1d" || selector == "heat3d") {
    HeatSetup s;
    s.dimension = selector == "heat1d" ? 1 : 3;
    s.h = p.real("h", s.dimension == 1 ? 0.02 : 0.04);
    s.tau = p.real("tau");
    if (s.dimension == 1)
      s.kappa = p.real("kappa", 1.0);
    else
      s.kappa_max = p.real("kappa_max", 0.4);
    const int iters = static_cast<int>(p.count("lipschitz_iterations", 30));
    PdeProblem pde = make_heat_problem(s);
    pde.problem = with_estimated_lipschitz(pde.problem, iters, seed);
    BuiltProblem out{selector, std::move(pde), std::nullopt, std::nullopt, {}};
    const HeatGrid g = resolve_heat_grid(s);
    std::ostringstream note;
    note << "time step " << g.tau << " (" << g.steps << " steps), stability number "
         << g.stability_number;
    out.notes.push_back(note.str());
    return out;
  }

  if (selector == "thermoacoustic") {
    ThermoacousticSetup s;
    s.h = p.real("h", 0.02);
    s.tau = p.real("tau", 0.002);
    s.start_value = p.real("q0", 0.0);
    const int iters = static_cast<int>(p.count("lipschitz_iterations", 100));
    PdeProblem pde = make_thermoacoustic_problem(s);
    pde.problem = with_estimated_lipschitz(pde.problem, iters, seed);
    return BuiltProblem{selector, std::move(pde), std::nullopt, std::nullopt, {}};
  }

  if (selector == "diagonal") {
    const std::size_t dim = p.count("dim", 10);
    const std::string kind = p.text("spectrum").value_or("random");
    if (kind == "random")
      return make_random_diagonal_problem(dim, seed, p.real("mu", 1e-2), p.real("L", 1.0));
    const Spectrum spectrum = named_spectrum(kind, p.real("kappa", 1.0), dim);
    std::mt19937_64 rng(seed);
    const double mu = spectrum[spectrum.size() - 1];
    return from_diagonal(selector, spectrum, random_unit(spectrum.size(), rng), mu);
  }

  if (selector == "adversarial") {
    const Spectrum spectrum = named_spectrum(p.text("spectrum").value_or("helmholtz"),
                                             p.real("kappa", 1.0), p.count("modes", 200));
    const std::size_t steps = p.count("N", 2);
    const double eps = p.real("epsilon", 0.5);
    AdversarialCertificate cert = adversarial_initial_point(spectrum, steps, eps);
    BuiltProblem out = from_diagonal(selector, spectrum, cert.xi, spectrum[spectrum.size() - 1]);
    out.certificate = std::move(cert);
    return out;
  }

  fail(ErrorCode::InvalidArgument, "unknown problem '" + selector + "'");
}

}  // namespace minerr
