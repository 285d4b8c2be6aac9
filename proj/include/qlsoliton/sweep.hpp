#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "qlsoliton/solver.hpp"
#include "qlsoliton/verify.hpp"

namespace qls {

struct SweepEntry {
  double kappa = 0.0;
  bool converged = false;
  double linf_u = 0.0;
  double linf_threshold = 0.0;
  bool linf_pass = false;
  double j_value = 0.0;
  double mp_level = 0.0;
  bool all_pass = false;
  std::string failure;  // nonempty if the solve threw
};

struct SweepResult {
  std::vector<SweepEntry> entries;                // sorted by kappa
  double empirical_threshold = 0.0;               // largest tested kappa passing all
  double formula_threshold = 0.0;                 // kappa_0 / kappa_1 from measured C
  std::optional<double> comparison_level;         // d_infty shared by all entries
  bool monotone = true;                           // pass-pattern was pass... fail...
};

//! Independent solves per kappa with warm starts; certificates re-validated
//! from scratch per entry. Solve failures are recorded, never fatal.
inline SweepResult kappa_sweep(const SolverConfig& base, std::vector<double> kappas,
                               const VerifyOptions& vopt = VerifyOptions{}) {
  if (kappas.empty()) throw ConfigError("sweep: empty kappa list");
  std::sort(kappas.begin(), kappas.end());
  for (double k : kappas)
    if (!(k > 0.0)) throw ConfigError("sweep: kappa values must be positive");

  SweepResult result;
  // d_infty does not depend on kappa; compute it once on the base grid
  if (base.compute_comparison_level) {
    GridPtr grid = make_grid(base.model.dim, base.radius, base.grid_nodes);
    result.comparison_level = comparison_level(base.model, grid, base.potential.v_infty,
                                               base.path_points, base.descent_tol);
  }

  std::optional<Field> warm;
  for (double k : kappas) {
    SweepEntry entry;
    entry.kappa = k;
    SolverConfig cfg = base;
    cfg.model.kappa = k;
    cfg.compute_comparison_level = false;
    try {
      cfg.validate();
      Solution sol = mountain_pass_solve(cfg, warm);
      sol.energy.comparison_level = result.comparison_level;
      entry.converged = sol.converged;
      entry.j_value = sol.energy.j_value;
      entry.mp_level = sol.energy.mp_level;
      VerificationReport rep = verify_solution(sol, vopt);
      entry.linf_u = rep.linf_u;
      entry.linf_threshold = rep.linf_threshold;
      entry.linf_pass = rep.linf_pass;
      entry.all_pass = rep.all_pass;
      result.formula_threshold = rep.kappa_threshold_formula_value;
      if (sol.converged) warm = sol.v;
    } catch (const std::exception& ex) {
      entry.failure = ex.what();
    }
    result.entries.push_back(entry);
  }

  // largest tested kappa with all certificates passing, and whether the
  // pass pattern is a clean prefix (monotone in kappa)
  double last_pass = 0.0;
  bool seen_fail = false;
  for (const auto& e : result.entries) {
    if (e.all_pass) {
      last_pass = e.kappa;
      if (seen_fail) result.monotone = false;
    } else {
      seen_fail = true;
    }
  }
  result.empirical_threshold = last_pass;
  return result;
}

//! Bisection on the all-certificates-pass predicate. Requires a pass at lo.
//! Returns the bracket midpoint once the bracket is narrower than tol.
inline double find_threshold(const SolverConfig& base, double lo, double hi, double tol,
                             const VerifyOptions& vopt = VerifyOptions{},
                             bool* monotone_warning = nullptr) {
  if (!(lo > 0.0) || !(hi >= lo)) throw ConfigError("find_threshold: need 0 < lo <= hi");
  if (monotone_warning) *monotone_warning = false;
  if (lo == hi) return lo;

  auto passes = [&](double k, std::optional<Field>& warm) {
    SolverConfig cfg = base;
    cfg.model.kappa = k;
    try {
      cfg.validate();
      Solution sol = mountain_pass_solve(cfg, warm);
      if (sol.converged) warm = sol.v;
      return verify_solution(sol, vopt).all_pass;
    } catch (const std::exception&) {
      return false;
    }
  };

  std::optional<Field> warm;
  const bool lo_pass = passes(lo, warm);
  if (!lo_pass)
    throw ConfigError("find_threshold: certificates already fail at the lower bracket");
  bool hi_pass = passes(hi, warm);
  if (hi_pass && monotone_warning) *monotone_warning = true;  // no failure in bracket
  double a = lo, b = hi;
  while (b - a > tol) {
    const double mid = 0.5 * (a + b);
    (passes(mid, warm) ? a : b) = mid;
  }
  return 0.5 * (a + b);
}

}  // namespace qls
