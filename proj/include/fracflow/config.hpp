// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "fracflow/core.hpp"

namespace fracflow {

/// One benchmark run: geometry selection, physical case, law parameters,
/// solver choices, tolerances, budget, and output locations. Values come
/// from a flat key=value file and/or command-line flags; flags win.
struct RunConfig {
  std::string geometry_kind = "benchmark";  // benchmark | single
  int level = 1;                            // refinement level (or n for single)
  std::string mortar_mode = "conforming";   // conforming | coarser
  int mortar_ratio = 1;

  std::string physical_case = "i";  // i | ii | iii | iv | heterogeneous | custom
  double epsilon = 1e-4;            // fracture aperture
  double K_gamma = 1.0;             // used when case == custom
  double alpha = 1.0;               // used when case == custom
  double beta = 0.0;
  double zeta = 0.0;

  std::string method = "fixed_point";  // fixed_point | newton
  std::string mode = "ms";             // ms | dd
  double tol_gmres = 1e-6;
  double tol_outer = 1e-6;
  long max_units = 10000;

  std::string out_dir = ".";
  std::string basis_dir = ".";  // cache directory for basis files
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace detail

/// Parse a flat key=value file; '#' starts a comment, blank lines ignored.
inline std::map<std::string, std::string> parse_key_values(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw FracflowError("config line " + std::to_string(lineno) +
                          ": expected key=value");
    kv[detail::trim(line.substr(0, eq))] = detail::trim(line.substr(eq + 1));
  }
  return kv;
}

inline void apply_key(RunConfig& c, const std::string& key, const std::string& val) {
  auto as_int = [&] { return std::stoi(val); };
  auto as_double = [&] { return std::stod(val); };
  if (key == "geometry.kind") c.geometry_kind = val;
  else if (key == "geometry.level") c.level = as_int();
  else if (key == "mortar.mode") c.mortar_mode = val;
  else if (key == "mortar.ratio") c.mortar_ratio = as_int();
  else if (key == "case") c.physical_case = val;
  else if (key == "epsilon") c.epsilon = as_double();
  else if (key == "K_gamma") c.K_gamma = as_double();
  else if (key == "alpha") c.alpha = as_double();
  else if (key == "beta") c.beta = as_double();
  else if (key == "zeta") c.zeta = as_double();
  else if (key == "method") c.method = val;
  else if (key == "mode") c.mode = val;
  else if (key == "tol_gmres") c.tol_gmres = as_double();
  else if (key == "tol_outer") c.tol_outer = as_double();
  else if (key == "max_units") c.max_units = std::stol(val);
  else if (key == "out_dir") c.out_dir = val;
  else if (key == "basis_dir") c.basis_dir = val;
  else throw FracflowError("unknown config key: " + key);
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw FracflowError("cannot open config file: " + path);
  RunConfig c;
  for (const auto& [k, v] : parse_key_values(f)) apply_key(c, k, v);
  return c;
}

inline void validate(const RunConfig& c) {
  auto one_of = [](const std::string& v, std::initializer_list<const char*> opts) {
    for (const char* o : opts)
      if (v == o) return true;
    return false;
  };
  if (!one_of(c.geometry_kind, {"benchmark", "single"}))
    throw FracflowError("geometry.kind must be benchmark or single");
  if (!one_of(c.physical_case, {"i", "ii", "iii", "iv", "heterogeneous", "custom"}))
    throw FracflowError("unknown case: " + c.physical_case);
  if (!one_of(c.method, {"fixed_point", "newton"}))
    throw FracflowError("method must be fixed_point or newton");
  if (!one_of(c.mode, {"ms", "dd"})) throw FracflowError("mode must be ms or dd");
  if (!one_of(c.mortar_mode, {"conforming", "coarser"}))
    throw FracflowError("mortar.mode must be conforming or coarser");
  if (c.level < 1) throw FracflowError("geometry.level must be positive");
  if (c.mortar_ratio < 1) throw FracflowError("mortar.ratio must be positive");
  if (c.tol_gmres <= 0 || c.tol_outer <= 0) throw FracflowError("tolerances must be positive");
  if (c.max_units < 0) throw FracflowError("max_units must be non-negative");
  if (c.epsilon <= 0) throw FracflowError("epsilon must be positive");
}

/// Table of (K_gamma, alpha) pairs indexed by case name; products of the
/// aperture with the tabulated permeability ratios.
inline std::pair<double, double> case_parameters(const std::string& name, double eps) {
  if (name == "i") return {1e4 * eps, 1e4 / eps};
  if (name == "ii") return {1e-4 * eps, 1e-4 / eps};
  if (name == "iii") return {1e4 * eps, 1e-4 / eps};
  if (name == "iv") return {1e-4 * eps, 1e4 / eps};
  throw FracflowError("no tabulated parameters for case: " + name);
}

}  // namespace fracflow
