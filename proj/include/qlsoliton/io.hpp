#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "qlsoliton/config.hpp"
#include "qlsoliton/sweep.hpp"
#include "qlsoliton/verify.hpp"
#include "qlsoliton/version.hpp"

namespace qls {

using ordered_json = nlohmann::ordered_json;

namespace detail {

inline std::string real17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << text;
  if (!out) throw IoError("write failed: " + path);
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Field / profile CSV
// ---------------------------------------------------------------------------

//! Single-column field as CSV (r, value); the header names the grid.
inline void write_field_csv(const std::string& path, const Field& f,
                            const std::string& column = "value") {
  std::ostringstream out;
  const auto& g = *f.grid;
  out << "# qlsoliton field dim=" << g.dim << " radius=" << detail::real17(g.radius)
      << " nodes=" << g.nodes << "\n";
  out << "r," << column << "\n";
  for (int i = 0; i < f.size(); ++i)
    out << detail::real17(g.r[i]) << "," << detail::real17(f[i]) << "\n";
  detail::write_text(path, out.str());
}

//! Profile of a solution as CSV (r, v, u) with a grid-describing header.
inline void write_profile_csv(const std::string& path, const Solution& sol) {
  std::ostringstream out;
  const auto& g = *sol.v.grid;
  out << "# qlsoliton profile dim=" << g.dim << " radius=" << detail::real17(g.radius)
      << " nodes=" << g.nodes << "\n";
  out << "r,v,u\n";
  for (int i = 0; i < sol.v.size(); ++i)
    out << detail::real17(g.r[i]) << "," << detail::real17(sol.v[i]) << ","
        << detail::real17(sol.u[i]) << "\n";
  detail::write_text(path, out.str());
}

struct ProfileData {
  GridPtr grid;
  Field v, u;
};

inline ProfileData read_profile_csv(const std::string& path) {
  std::istringstream in(detail::read_text(path));
  std::string header;
  if (!std::getline(in, header) || header.rfind("# qlsoliton profile", 0) != 0)
    throw IoError("profile csv: missing grid header line in " + path);
  int dim = 0, nodes = 0;
  double radius = 0.0;
  if (std::sscanf(header.c_str(), "# qlsoliton profile dim=%d radius=%lf nodes=%d", &dim,
                  &radius, &nodes) != 3)
    throw IoError("profile csv: malformed grid header in " + path);
  std::string columns;
  std::getline(in, columns);
  ProfileData data;
  data.grid = make_grid(dim, radius, nodes);
  data.v = Field(data.grid);
  data.u = Field(data.grid);
  std::string line;
  int i = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (i >= nodes) throw IoError("profile csv: more rows than grid nodes in " + path);
    double r, v, u;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &r, &v, &u) != 3)
      throw IoError("profile csv: malformed row " + std::to_string(i + 1) + " in " + path);
    data.v.values[i] = v;
    data.u.values[i] = u;
    ++i;
  }
  if (i != nodes) throw IoError("profile csv: expected " + std::to_string(nodes) +
                                " rows, got " + std::to_string(i) + " in " + path);
  return data;
}

// ---------------------------------------------------------------------------
// Solution / report JSON
// ---------------------------------------------------------------------------

inline ordered_json model_to_json(const ModelSpec& m) {
  ordered_json j;
  j["type"] = m.semilinear_reference ? "semilinear" : model_name(m.model);
  j["kappa"] = m.kappa;
  j["q"] = m.q;
  j["dim"] = m.dim;
  return j;
}

inline ordered_json potential_to_json(const PotentialSpec& p) {
  ordered_json j;
  j["shape"] = p.shape == PotentialShape::Constant ? "constant" : "gaussian_well";
  j["v_infty"] = p.v_infty;
  if (p.shape == PotentialShape::GaussianWell) {
    j["depth"] = p.well_depth;
    j["width"] = p.well_width;
  }
  return j;
}

inline ordered_json solution_to_json(const Solution& sol, const std::string& profile_file) {
  ordered_json j;
  j["artifact"] = "qlsoliton";
  j["version"] = kVersion;
  j["model"] = model_to_json(sol.model);
  j["potential"] = potential_to_json(sol.potential);
  j["grid"] = {{"dim", sol.v.grid->dim},
               {"radius", sol.v.grid->radius},
               {"nodes", sol.v.grid->nodes}};
  j["profile_file"] = profile_file;
  j["converged"] = sol.converged;
  j["iterations"] = sol.iterations;
  ordered_json en;
  en["j_value"] = sol.energy.j_value;
  en["i_value"] = sol.energy.i_value;
  en["grad_norm"] = sol.energy.grad_norm;
  en["mp_level"] = sol.energy.mp_level;
  if (sol.energy.comparison_level) en["comparison_level"] = *sol.energy.comparison_level;
  j["energy"] = en;
  ordered_json tr = ordered_json::array();
  for (const auto& t : sol.path_trace)
    tr.push_back({{"iteration", t.iteration}, {"path_max", t.path_max_energy}});
  j["path_trace"] = tr;
  return j;
}

inline Solution solution_from_json(const ordered_json& j, const std::string& base_dir) {
  Solution sol;
  const auto& m = j.at("model");
  const std::string type = m.at("type").get<std::string>();
  if (type == "semilinear")
    sol.model = ModelSpec::semilinear(m.at("q").get<double>(), m.at("dim").get<int>());
  else if (type == "power")
    sol.model = ModelSpec::power(m.at("kappa").get<double>(), m.at("q").get<double>(),
                                 m.at("dim").get<int>());
  else if (type == "saturable")
    sol.model = ModelSpec::saturable(m.at("kappa").get<double>(), m.at("q").get<double>(),
                                     m.at("dim").get<int>());
  else
    throw IoError("solution json: unknown model type '" + type + "'");
  const auto& p = j.at("potential");
  const std::string shape = p.at("shape").get<std::string>();
  if (shape == "constant")
    sol.potential = PotentialSpec::constant(p.at("v_infty").get<double>());
  else
    sol.potential = PotentialSpec::gaussian_well(p.at("v_infty").get<double>(),
                                                 p.at("depth").get<double>(),
                                                 p.at("width").get<double>());
  const std::string profile =
      (std::filesystem::path(base_dir) / j.at("profile_file").get<std::string>()).string();
  ProfileData data = read_profile_csv(profile);
  const auto& gj = j.at("grid");
  if (data.grid->dim != gj.at("dim").get<int>() ||
      data.grid->nodes != gj.at("nodes").get<int>())
    throw IoError("solution json: profile grid does not match the recorded grid");
  sol.v = std::move(data.v);
  sol.u = std::move(data.u);
  sol.converged = j.at("converged").get<bool>();
  sol.iterations = j.at("iterations").get<int>();
  const auto& en = j.at("energy");
  sol.energy.j_value = en.at("j_value").get<double>();
  sol.energy.i_value = en.at("i_value").get<double>();
  sol.energy.grad_norm = en.at("grad_norm").get<double>();
  sol.energy.mp_level = en.at("mp_level").get<double>();
  if (en.contains("comparison_level"))
    sol.energy.comparison_level = en.at("comparison_level").get<double>();
  if (j.contains("path_trace"))
    for (const auto& t : j.at("path_trace"))
      sol.path_trace.push_back(
          {t.at("iteration").get<int>(), t.at("path_max").get<double>()});
  return sol;
}

inline ordered_json verification_to_json(const VerificationReport& r,
                                         const VerifyOptions& opt = VerifyOptions{}) {
  ordered_json j;
  j["artifact"] = "qlsoliton";
  j["version"] = kVersion;
  j["converged"] = r.converged;
  j["tolerances"] = {{"pde_residual", opt.pde_residual_tol},
                     {"original_residual", opt.original_residual_tol},
                     {"pohozaev", opt.pohozaev_tol},
                     {"inequality_slack", opt.inequality_slack},
                     {"decay_r2_min", opt.decay_r2_min}};
  j["pde"] = {{"scale", r.residual_scale},
              {"residual_max", r.pde_residual_max},
              {"residual_l2", r.pde_residual_l2},
              {"pass", r.pde_pass},
              {"original_residual_max", r.original_residual_max},
              {"original_pass", r.original_pass}};
  j["linf"] = {{"v", r.linf_v},
               {"u", r.linf_u},
               {"threshold", r.linf_threshold},
               {"chain_factor", r.linf_chain_factor},
               {"pass", r.linf_pass}};
  ordered_json eb = {{"lhs", r.energy_bound_lhs},
                     {"rhs", r.energy_bound_rhs},
                     {"pass", r.energy_bound_pass}};
  if (r.comparison_bound_rhs) {
    eb["comparison_rhs"] = *r.comparison_bound_rhs;
    eb["comparison_pass"] = r.comparison_bound_pass;
  }
  j["energy_bound"] = eb;
  j["pohozaev"] = {{"applicable", r.pohozaev_applicable},
                   {"residual", r.pohozaev_residual},
                   {"pass", r.pohozaev_pass}};
  ordered_json chain = ordered_json::array();
  for (const auto& it : r.moser_chain)
    chain.push_back(
        {{"beta", it.beta}, {"lhs", it.lhs}, {"rhs", it.rhs}, {"pass", it.pass}});
  j["moser"] = {{"applicable", r.moser_applicable},
                {"chain", chain},
                {"c0", r.moser_c0},
                {"linf_bound", r.moser_linf_bound},
                {"pass", r.moser_pass}};
  j["qualitative"] = {{"applicable", r.qualitative_applicable},
                      {"nontrivial", r.nontrivial_pass},
                      {"positivity", r.positivity_pass},
                      {"monotonicity", r.monotonicity_pass},
                      {"decay_rate", r.decay_rate},
                      {"decay_fit_r2", r.decay_fit_r2},
                      {"decay_pass", r.decay_pass}};
  j["kappa_threshold_formula"] = r.kappa_threshold_formula_value;
  j["all_pass"] = r.all_pass;
  return j;
}

inline ordered_json sweep_to_json(const SweepResult& r) {
  ordered_json j;
  j["artifact"] = "qlsoliton";
  j["version"] = kVersion;
  ordered_json entries = ordered_json::array();
  for (const auto& e : r.entries) {
    ordered_json je;
    je["kappa"] = e.kappa;
    je["converged"] = e.converged;
    je["linf_u"] = e.linf_u;
    je["linf_threshold"] = e.linf_threshold;
    je["linf_pass"] = e.linf_pass;
    je["j_value"] = e.j_value;
    je["mp_level"] = e.mp_level;
    je["all_pass"] = e.all_pass;
    if (!e.failure.empty()) je["failure"] = e.failure;
    entries.push_back(je);
  }
  j["entries"] = entries;
  j["empirical_threshold"] = r.empirical_threshold;
  j["formula_threshold"] = r.formula_threshold;
  if (r.comparison_level) j["comparison_level"] = *r.comparison_level;
  j["monotone"] = r.monotone;
  return j;
}

inline void write_sweep_csv(const std::string& path, const SweepResult& r) {
  std::ostringstream out;
  out << "kappa,linf_u,linf_threshold,linf_pass,all_pass,j_value,mp_level,converged\n";
  for (const auto& e : r.entries)
    out << detail::real17(e.kappa) << "," << detail::real17(e.linf_u) << ","
        << detail::real17(e.linf_threshold) << "," << (e.linf_pass ? 1 : 0) << ","
        << (e.all_pass ? 1 : 0) << "," << detail::real17(e.j_value) << ","
        << detail::real17(e.mp_level) << "," << (e.converged ? 1 : 0) << "\n";
  detail::write_text(path, out.str());
}

//! Transform table CSV: t, g, g', G, G_inverse, f, F.
inline std::string transform_table_csv(const ModelSpec& spec, double t_max, int samples) {
  Transform tf(spec);
  std::ostringstream out;
  out << "t,g,g_prime,G,G_inverse,f,F\n";
  for (int i = 0; i < samples; ++i) {
    const double t = t_max * i / (samples - 1);
    out << detail::real17(t) << "," << detail::real17(tf.g(t)) << ","
        << detail::real17(tf.g_derivative(t)) << "," << detail::real17(tf.G(t)) << ","
        << detail::real17(tf.G_inverse(t)) << "," << detail::real17(tf.nonlinearity(t))
        << "," << detail::real17(tf.nonlinearity_primitive(t)) << "\n";
  }
  return out.str();
}

}  // namespace qls
