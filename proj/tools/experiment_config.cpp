#include "experiment_config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>

#include "minerr/minerr.h"

namespace bench {

ConfigError::ConfigError(const std::string& source, int line, const std::string& message)
    : std::runtime_error(source + ":" + std::to_string(line) + ": " + message), line_(line) {}

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

template <class T>
bool parse_number(const std::string& text, T& out) {
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc{} && ptr == text.data() + text.size();
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::string item;
  for (char c : value + ",") {
    if (c == ',' || c == ' ' || c == '\t') {
      if (!item.empty()) out.push_back(std::move(item));
      item.clear();
    } else {
      item += c;
    }
  }
  return out;
}

// Parameter names the catalog declares for a problem selector; empty if unknown.
std::optional<std::set<std::string>> catalog_keys(const std::string& selector) {
  for (size_t i = 0; i < minerr_catalog_size(); ++i) {
    const char* name = nullptr;
    size_t count = 0;
    minerr_catalog_entry(i, &name, nullptr, &count);
    if (selector != name) continue;
    std::set<std::string> keys;
    for (size_t j = 0; j < count; ++j) {
      const char* key = nullptr;
      minerr_catalog_param(i, j, &key, nullptr, nullptr);
      keys.insert(key);
    }
    return keys;
  }
  return std::nullopt;
}

}  // namespace

ExperimentConfig parse_config(std::istream& in, const std::string& source) {
  ExperimentConfig cfg;
  std::string section;
  std::string raw;
  int line_no = 0;
  std::vector<std::pair<std::pair<std::string, std::string>, int>> params;
  std::set<std::string> seen;

  auto error = [&](const std::string& msg) { return ConfigError(source, line_no, msg); };

  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw.substr(0, raw.find('#'));
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw error("unterminated section header");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      if (section != "problem" && section != "run")
        throw error("unknown section [" + section + "] (expected [problem] or [run])");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw error("expected 'key = value'");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) throw error("missing key before '='");
    if (section.empty()) throw error("'" + key + "' appears before any section header");
    if (!seen.insert(section + "." + key).second) throw error("duplicate key '" + key + "'");

    if (section == "problem") {
      if (key == "name") {
        cfg.problem = value;
        cfg.problem_line = line_no;
      } else {
        params.push_back({{key, value}, line_no});
      }
      continue;
    }

    if (key == "methods") {
      cfg.methods = split_list(value);
      if (cfg.methods.empty()) throw error("methods list is empty");
      for (const auto& m : cfg.methods)
        if (minerr_method_check(m.c_str()) != MINERR_OK) throw error("unknown method '" + m + "'");
    } else if (key == "budget") {
      if (!parse_number(value, cfg.budget) || cfg.budget < 1)
        throw error("budget must be a positive integer");
    } else if (key == "seed") {
      if (!parse_number(value, cfg.seed)) throw error("seed must be an unsigned 64-bit integer");
    } else if (key == "degeneracy_tolerance") {
      if (!parse_number(value, cfg.degeneracy_tolerance) || !(cfg.degeneracy_tolerance > 0.0) ||
          !(cfg.degeneracy_tolerance < 1.0))
        throw error("degeneracy_tolerance must lie in (0, 1)");
    } else if (key == "target_functional" || key == "target_distance") {
      double v = 0.0;
      if (!parse_number(value, v) || !(v >= 0.0) || !std::isfinite(v))
        throw error(key + " must be a non-negative number");
      (key == "target_functional" ? cfg.target_functional : cfg.target_distance) = v;
    } else if (key == "snapshots") {
      if (value != "true" && value != "false") throw error("snapshots must be true or false");
      cfg.snapshots = value == "true";
    } else {
      throw error("unknown [run] key '" + key + "'");
    }
  }

  line_no = std::max(line_no, 1);
  if (cfg.problem.empty()) throw error("missing [problem] name");
  if (cfg.methods.empty()) throw error("missing [run] methods");
  const auto keys = catalog_keys(cfg.problem);
  if (!keys) {
    line_no = cfg.problem_line;
    throw error("unknown problem '" + cfg.problem + "' (see `list`)");
  }
  for (const auto& [kv, at] : params) {
    if (!keys->count(kv.first)) {
      line_no = at;
      throw error("problem '" + cfg.problem + "' has no parameter '" + kv.first + "'");
    }
    cfg.params.push_back(kv);
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, 0, "cannot open file");
  return parse_config(in, path);
}

}  // namespace bench
