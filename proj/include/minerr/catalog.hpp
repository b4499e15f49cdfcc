#pragma once

// Named problem families built from string parameters, shared by the CLI, the
// C interface and the verification suites.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "minerr/pde.hpp"
#include "minerr/spectral.hpp"

namespace minerr {

using ParamMap = std::map<std::string, std::string>;

struct ParamInfo {
  std::string key;
  std::string default_value;
  std::string meaning;
};

struct ProblemInfo {
  std::string selector;
  std::string summary;
  std::vector<ParamInfo> params;
};

/// helmholtz, heat1d, heat3d, thermoacoustic, diagonal, adversarial.
const std::vector<ProblemInfo>& problem_catalog();

struct BuiltProblem {
  std::string selector;
  PdeProblem pde;
  std::optional<double> mu;  // smallest eigenvalue of B when known in closed form
  std::optional<AdversarialCertificate> certificate;
  std::vector<std::string> notes;
};

/// Throws InvalidArgument for unknown selectors, unknown keys or malformed values.
BuiltProblem build_problem(const std::string& selector, const ParamMap& params,
                           std::uint64_t seed);

/// Dense A_0 = U diag(sqrt lambda) U^T with a random orthogonal U and eigenvalues
/// of B spread log-uniformly over [mu, L] (both attained); q* and q0 are random.
BuiltProblem make_random_spd_problem(std::size_t dim, std::uint64_t seed, double mu = 1e-2,
                                     double lipschitz = 1.0);

/// Diagonal model with log-uniform random eigenvalues in [mu, L] (both attained)
/// and a random unit xi.
BuiltProblem make_random_diagonal_problem(std::size_t dim, std::uint64_t seed, double mu = 1e-2,
                                          double lipschitz = 1.0);

/// Same problem with the Lipschitz constant estimated by power iteration.
QuadraticProblem with_estimated_lipschitz(const QuadraticProblem& problem, int iterations,
                                          std::uint64_t seed);

}  // namespace minerr
