#pragma once

// Experiment files: line-oriented `key = value` pairs under [problem] and [run]
// headers; `#` starts a comment.
//
//   [problem]
//   name = helmholtz
//   modes = 200
//
//   [run]
//   methods = mme1, mme_inf, cg_fr
//   budget = 100

#include <cstdint>
#include <istream>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace bench {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& source, int line, const std::string& message);
  int line() const noexcept { return line_; }

 private:
  int line_;
};

struct ExperimentConfig {
  std::string problem;
  int problem_line = 0;
  std::vector<std::pair<std::string, std::string>> params;
  std::vector<std::string> methods;
  int budget = 100;
  std::uint64_t seed = 1;
  double degeneracy_tolerance = 1e-12;
  std::optional<double> target_functional;
  std::optional<double> target_distance;
  bool snapshots = true;
};

ExperimentConfig parse_config(std::istream& in, const std::string& source);
ExperimentConfig load_config(const std::string& path);

}  // namespace bench
