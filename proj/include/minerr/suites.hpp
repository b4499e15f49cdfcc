#pragma once

// Invariant suites run across the desk-size problem families: adjoint
// exactness, the 2J identity, step orthogonality, telescoping, Krylov
// optimality, the rate inequalities and the slow-convergence construction.

#include <cstdint>
#include <string>
#include <vector>

#include "minerr/catalog.hpp"

namespace minerr {

struct Check {
  std::string problem;
  std::string name;
  double measured = 0.0;   // worst defect (or the quantity compared)
  double threshold = 0.0;
  bool passed = false;
  std::string detail;      // where the worst case occurred
};

struct SuiteReport {
  std::string suite;
  std::vector<Check> checks;
  bool passed() const;
};

const std::vector<std::string>& suite_names();

/// Throws InvalidArgument for an unknown suite name.
SuiteReport run_suite(const std::string& name, std::uint64_t seed);

/// helmholtz (200 modes), heat1d (h = 0.02), heat3d (h = 0.1), thermoacoustic
/// (h = 0.04, tau = 0.02), a random 10-mode diagonal model and a random 12-dim
/// dense SPD problem.
std::vector<BuiltProblem> desk_families(std::uint64_t seed);

}  // namespace minerr
