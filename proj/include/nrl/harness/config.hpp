#pragma once

// Experiment configuration: a flat `key = value` text format, `#` comments,
// comma-separated lists.

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "nrl/core.hpp"

namespace nrl {

struct ExperimentConfig {
  int n = 2;
  double p = 4.0;
  std::vector<int> ells{1, 2};
  double box_lo = -2.0;
  double box_hi = 2.0;
  std::vector<int> grids{32, 64};
  std::string family = "auto";  ///< "auto": each study picks its own family

  // Besov routes
  int besov_grid = 128;
  double t_min = 1e-3;
  double t_max = 10.0;
  int t_per_decade = 16;
  double log_step = 0.05;
  int shift_radii = 48;
  int shift_dirs = 32;

  // dyadic audits
  int shift_count = 9;
  int energy_k_min = -1;
  int energy_k_max = 4;
  int nwo_k_min = 0;
  int nwo_k_max = 4;
  double nwo_A = 2.0;
  int nwo_samples = 4;
  int lemma_k_min = -1;
  int lemma_k_max = 5;
  int audit_grid = 32;
  int div_k_min = -1;
  int div_k_max = 4;

  // sign lemma
  double sign_A = 16.0;
  std::vector<double> sign_A_ladder{1, 2, 3, 4, 6, 8, 12, 16, 24, 32};
  int sign_cubes = 50;
  int sign_samples = 20;
  double sign_interior_sides = 2.0;

  // calibration constants
  double ratio_spread_max = 20.0;
  double refine_tol = 0.15;
  double growth_min = 1.5;
  double stat_growth_min = 1.3;
  double lower_band = 0.25;
  double lemma_C = 50.0;
  double double_integral_C = 1000.0;
  double russo_slack = 1.1;
  double besov_equiv = 10.0;

  int spectrum_max_nodes = 1024;
  std::uint64_t seed = 1;
  std::string out_dir = "out";
  bool p_set = false;  ///< p came from the file or the command line
};

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

/// Parsed key/value pairs in file order (keys are unique).
using KeyValues = std::map<std::string, std::string>;

inline KeyValues parse_key_values(std::istream& in) {
  KeyValues kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error("config line " + std::to_string(lineno) + ": expected key = value");
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) throw Error("config line " + std::to_string(lineno) + ": empty key");
    if (kv.count(key)) throw Error("config line " + std::to_string(lineno) + ": duplicate key " + key);
    kv[key] = trim(line.substr(eq + 1));
  }
  return kv;
}

namespace detail {

inline double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw Error("config key " + key + ": not a number: " + v);
  }
}

inline int to_int(const std::string& key, const std::string& v) {
  const double d = to_double(key, v);
  if (d != static_cast<int>(d)) throw Error("config key " + key + ": not an integer: " + v);
  return static_cast<int>(d);
}

}  // namespace detail

inline void apply_key(ExperimentConfig& c, const std::string& key, const std::string& v) {
  using detail::to_double;
  using detail::to_int;
  auto ints = [&](std::vector<int>& dst) {
    dst.clear();
    for (const auto& s : split_list(v)) dst.push_back(to_int(key, s));
  };
  auto doubles = [&](std::vector<double>& dst) {
    dst.clear();
    for (const auto& s : split_list(v)) dst.push_back(to_double(key, s));
  };
  const std::map<std::string, double*> reals{
      {"box_lo", &c.box_lo}, {"box_hi", &c.box_hi}, {"t_min", &c.t_min}, {"t_max", &c.t_max},
      {"log_step", &c.log_step}, {"nwo_A", &c.nwo_A}, {"sign_A", &c.sign_A},
      {"sign_interior_sides", &c.sign_interior_sides}, {"ratio_spread_max", &c.ratio_spread_max},
      {"refine_tol", &c.refine_tol}, {"growth_min", &c.growth_min},
      {"stat_growth_min", &c.stat_growth_min}, {"lower_band", &c.lower_band},
      {"lemma_C", &c.lemma_C}, {"double_integral_C", &c.double_integral_C},
      {"russo_slack", &c.russo_slack}, {"besov_equiv", &c.besov_equiv}};
  const std::map<std::string, int*> integers{
      {"n", &c.n}, {"besov_grid", &c.besov_grid}, {"t_per_decade", &c.t_per_decade},
      {"shift_radii", &c.shift_radii}, {"shift_dirs", &c.shift_dirs},
      {"shift_count", &c.shift_count}, {"energy_k_min", &c.energy_k_min},
      {"energy_k_max", &c.energy_k_max}, {"nwo_k_min", &c.nwo_k_min}, {"nwo_k_max", &c.nwo_k_max},
      {"nwo_samples", &c.nwo_samples}, {"lemma_k_min", &c.lemma_k_min},
      {"lemma_k_max", &c.lemma_k_max}, {"audit_grid", &c.audit_grid},
      {"div_k_min", &c.div_k_min}, {"div_k_max", &c.div_k_max}, {"sign_cubes", &c.sign_cubes},
      {"sign_samples", &c.sign_samples}, {"spectrum_max_nodes", &c.spectrum_max_nodes}};
  if (auto it = reals.find(key); it != reals.end()) {
    *it->second = to_double(key, v);
  } else if (auto jt = integers.find(key); jt != integers.end()) {
    *jt->second = to_int(key, v);
  } else if (key == "p") {
    c.p = to_double(key, v);
    c.p_set = true;
  } else if (key == "ell") {
    ints(c.ells);
  } else if (key == "grids") {
    ints(c.grids);
  } else if (key == "sign_A_ladder") {
    doubles(c.sign_A_ladder);
  } else if (key == "family") {
    c.family = v;
  } else if (key == "out") {
    c.out_dir = v;
  } else if (key == "seed") {
    c.seed = static_cast<std::uint64_t>(std::stoull(v));
  } else {
    throw Error("unknown config key: " + key);
  }
}

inline void validate(const ExperimentConfig& c) {
  require(c.n >= 2 && c.n <= 3, "dimension must be 2 or 3");
  require(c.p > 0.0, "p must be positive");
  require(!c.ells.empty(), "no Riesz components requested");
  for (int l : c.ells) require(l >= 1 && l <= c.n, "Riesz component out of range");
  require(c.box_hi > c.box_lo, "degenerate domain");
  require(!c.grids.empty(), "empty grid ladder");
  for (std::size_t i = 0; i < c.grids.size(); ++i) {
    require(c.grids[i] >= 4 && c.grids[i] % 2 == 0, "grid sizes must be even and at least 4");
    if (i > 0) require(c.grids[i] > c.grids[i - 1], "grid ladder must be strictly increasing");
  }
  require(c.shift_count >= 1 && c.shift_count <= 9, "shift_count must be between 1 and 9");
}

inline ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig c;
  for (const auto& [k, v] : parse_key_values(in)) apply_key(c, k, v);
  validate(c);
  return c;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config: " + path);
  return parse_config(in);
}

}  // namespace nrl
