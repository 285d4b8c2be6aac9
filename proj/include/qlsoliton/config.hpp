#pragma once

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qlsoliton/solver.hpp"

namespace qls {

struct SweepSettings {
  double kappa_min = 1e-3;
  double kappa_max = 0.3;
  int count = 13;  // log-spaced
  bool bisect = false;
  double bisect_tol = 1e-3;
};

struct TableSettings {
  double t_max = 5.0;
  int samples = 201;
};

//! Everything a batch run needs; parsed from the sectioned key-value format.
struct RunConfig {
  SolverConfig solver;
  SweepSettings sweep;
  TableSettings table;
  std::string out_dir = "out";
};

namespace detail {

inline std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

inline double parse_real(const std::string& v, int line) {
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0')
    throw ConfigError("config line " + std::to_string(line) + ": malformed number '" + v + "'");
  return x;
}

inline int parse_int(const std::string& v, int line) {
  char* end = nullptr;
  const long x = std::strtol(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0')
    throw ConfigError("config line " + std::to_string(line) + ": malformed integer '" + v + "'");
  return static_cast<int>(x);
}

inline bool parse_bool(const std::string& v, int line) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("config line " + std::to_string(line) + ": expected a boolean, got '" + v +
                    "'");
}

inline std::string format_real(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace detail

//! Parses the sectioned key-value format; all defaults documented in the
//! serializer below; unknown sections or keys are rejected with the line.
inline RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::optional<double> q_opt, kappa_opt;
  std::string model_type = "power";

  std::istringstream in(text);
  std::string line;
  std::string section = "";
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config line " + std::to_string(lineno) + ": unterminated section");
      section = detail::trim(line.substr(1, line.size() - 2));
      if (section != "model" && section != "potential" && section != "grid" &&
          section != "solver" && section != "sweep" && section != "table" &&
          section != "output")
        throw ConfigError("config line " + std::to_string(lineno) + ": unknown section [" +
                          section + "]");
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string val = detail::trim(line.substr(eq + 1));
    if (key.empty() || val.empty())
      throw ConfigError("config line " + std::to_string(lineno) + ": empty key or value");

    auto unknown = [&]() -> ConfigError {
      return ConfigError("config line " + std::to_string(lineno) + ": unknown key '" + key +
                         "' in section [" + section + "]");
    };

    if (section == "model") {
      if (key == "type") {
        if (val != "power" && val != "saturable" && val != "semilinear")
          throw ConfigError("config line " + std::to_string(lineno) +
                            ": model type must be power, saturable or semilinear");
        model_type = val;
      } else if (key == "kappa")
        kappa_opt = detail::parse_real(val, lineno);
      else if (key == "q")
        q_opt = detail::parse_real(val, lineno);
      else if (key == "dim")
        cfg.solver.model.dim = detail::parse_int(val, lineno);
      else
        throw unknown();
    } else if (section == "potential") {
      if (key == "shape") {
        if (val == "constant")
          cfg.solver.potential.shape = PotentialShape::Constant;
        else if (val == "gaussian_well")
          cfg.solver.potential.shape = PotentialShape::GaussianWell;
        else
          throw ConfigError("config line " + std::to_string(lineno) +
                            ": potential shape must be constant or gaussian_well");
      } else if (key == "v_infty")
        cfg.solver.potential.v_infty = detail::parse_real(val, lineno);
      else if (key == "depth")
        cfg.solver.potential.well_depth = detail::parse_real(val, lineno);
      else if (key == "width")
        cfg.solver.potential.well_width = detail::parse_real(val, lineno);
      else
        throw unknown();
    } else if (section == "grid") {
      if (key == "nodes")
        cfg.solver.grid_nodes = detail::parse_int(val, lineno);
      else if (key == "radius")
        cfg.solver.radius = detail::parse_real(val, lineno);
      else if (key == "adaptive_radius")
        cfg.solver.adaptive_radius = detail::parse_bool(val, lineno);
      else
        throw unknown();
    } else if (section == "solver") {
      if (key == "path_points")
        cfg.solver.path_points = detail::parse_int(val, lineno);
      else if (key == "descent_tol")
        cfg.solver.descent_tol = detail::parse_real(val, lineno);
      else if (key == "max_iters")
        cfg.solver.max_iters = detail::parse_int(val, lineno);
      else if (key == "seed_amplitude")
        cfg.solver.seed_amplitude = detail::parse_real(val, lineno);
      else if (key == "comparison_level")
        cfg.solver.compute_comparison_level = detail::parse_bool(val, lineno);
      else
        throw unknown();
    } else if (section == "sweep") {
      if (key == "kappa_min")
        cfg.sweep.kappa_min = detail::parse_real(val, lineno);
      else if (key == "kappa_max")
        cfg.sweep.kappa_max = detail::parse_real(val, lineno);
      else if (key == "count")
        cfg.sweep.count = detail::parse_int(val, lineno);
      else if (key == "bisect")
        cfg.sweep.bisect = detail::parse_bool(val, lineno);
      else if (key == "bisect_tol")
        cfg.sweep.bisect_tol = detail::parse_real(val, lineno);
      else
        throw unknown();
    } else if (section == "table") {
      if (key == "t_max")
        cfg.table.t_max = detail::parse_real(val, lineno);
      else if (key == "samples")
        cfg.table.samples = detail::parse_int(val, lineno);
      else
        throw unknown();
    } else if (section == "output") {
      if (key == "dir")
        cfg.out_dir = val;
      else
        throw unknown();
    } else {
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": key outside of any section");
    }
  }

  // resolve the model: q defaults sit inside the admissible windows
  if (model_type == "semilinear") {
    cfg.solver.model.model = Model::PowerQ;
    cfg.solver.model.kappa = 0.0;
    cfg.solver.model.semilinear_reference = true;
    if (kappa_opt && *kappa_opt != 0.0)
      throw ConfigError("config: semilinear mode requires kappa = 0 (or omit kappa)");
    cfg.solver.model.q = q_opt.value_or(3.0);
  } else if (model_type == "power") {
    cfg.solver.model.model = Model::PowerQ;
    if (!kappa_opt) throw ConfigError("config: missing required key kappa in [model]");
    cfg.solver.model.kappa = *kappa_opt;
    cfg.solver.model.q = q_opt.value_or(3.0);
  } else {
    cfg.solver.model.model = Model::Saturable;
    if (!kappa_opt) throw ConfigError("config: missing required key kappa in [model]");
    cfg.solver.model.kappa = *kappa_opt;
    cfg.solver.model.q = q_opt.value_or(2.5);
  }

  cfg.solver.validate();
  if (!(cfg.sweep.kappa_min > 0.0) || !(cfg.sweep.kappa_max >= cfg.sweep.kappa_min))
    throw ConfigError("config: sweep window must satisfy 0 < kappa_min <= kappa_max");
  if (cfg.sweep.count < 1) throw ConfigError("config: sweep count must be >= 1");
  if (cfg.table.samples < 2) throw ConfigError("config: table samples must be >= 2");
  if (!(cfg.table.t_max > 0.0)) throw ConfigError("config: table t_max must be positive");
  return cfg;
}

//! Canonical serialization; parse(serialize(x)) == x.
inline std::string serialize_config(const RunConfig& cfg) {
  using detail::format_real;
  std::ostringstream out;
  const ModelSpec& m = cfg.solver.model;
  out << "[model]\n";
  out << "type = "
      << (m.semilinear_reference ? "semilinear"
                                 : (m.model == Model::PowerQ ? "power" : "saturable"))
      << "\n";
  if (!m.semilinear_reference) out << "kappa = " << format_real(m.kappa) << "\n";
  out << "q = " << format_real(m.q) << "\n";
  out << "dim = " << m.dim << "\n\n";

  const PotentialSpec& p = cfg.solver.potential;
  out << "[potential]\n";
  out << "shape = "
      << (p.shape == PotentialShape::Constant ? "constant" : "gaussian_well") << "\n";
  out << "v_infty = " << format_real(p.v_infty) << "\n";
  if (p.shape == PotentialShape::GaussianWell) {
    out << "depth = " << format_real(p.well_depth) << "\n";
    out << "width = " << format_real(p.well_width) << "\n";
  }
  out << "\n[grid]\n";
  out << "nodes = " << cfg.solver.grid_nodes << "\n";
  out << "radius = " << format_real(cfg.solver.radius) << "\n";
  out << "adaptive_radius = " << (cfg.solver.adaptive_radius ? "true" : "false") << "\n";
  out << "\n[solver]\n";
  out << "path_points = " << cfg.solver.path_points << "\n";
  out << "descent_tol = " << format_real(cfg.solver.descent_tol) << "\n";
  out << "max_iters = " << cfg.solver.max_iters << "\n";
  out << "seed_amplitude = " << format_real(cfg.solver.seed_amplitude) << "\n";
  out << "comparison_level = " << (cfg.solver.compute_comparison_level ? "true" : "false")
      << "\n";
  out << "\n[sweep]\n";
  out << "kappa_min = " << format_real(cfg.sweep.kappa_min) << "\n";
  out << "kappa_max = " << format_real(cfg.sweep.kappa_max) << "\n";
  out << "count = " << cfg.sweep.count << "\n";
  out << "bisect = " << (cfg.sweep.bisect ? "true" : "false") << "\n";
  out << "bisect_tol = " << format_real(cfg.sweep.bisect_tol) << "\n";
  out << "\n[table]\n";
  out << "t_max = " << format_real(cfg.table.t_max) << "\n";
  out << "samples = " << cfg.table.samples << "\n";
  out << "\n[output]\n";
  out << "dir = " << cfg.out_dir << "\n";
  return out.str();
}

//! Log-spaced kappa list of the sweep settings.
inline std::vector<double> sweep_kappas(const SweepSettings& s) {
  std::vector<double> ks;
  if (s.count == 1 || s.kappa_max == s.kappa_min) {
    ks.push_back(s.kappa_min);
    return ks;
  }
  const double la = std::log(s.kappa_min), lb = std::log(s.kappa_max);
  for (int i = 0; i < s.count; ++i)
    ks.push_back(std::exp(la + (lb - la) * i / (s.count - 1)));
  return ks;
}

}  // namespace qls
