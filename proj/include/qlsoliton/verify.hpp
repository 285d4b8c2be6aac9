#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "qlsoliton/functional.hpp"
#include "qlsoliton/grid.hpp"
#include "qlsoliton/solver.hpp"
#include "qlsoliton/transforms.hpp"

namespace qls {

//! Sharp Sobolev constant S of R^N in the convention
//! ||w||_{2*}^2 <= S ||grad w||_2^2  (Talenti).
inline double sobolev_constant(int dim) {
  const double N = dim;
  const double c = std::exp(2.0 / N * (std::lgamma(N) - std::lgamma(0.5 * N)));
  return c / (N * (N - 2.0) * M_PI);
}

//! ||v||_p on the grid, overflow-safe for large p.
inline double lp_norm(const Field& v, double p) {
  const double m = max_abs(v);
  if (m == 0.0) return 0.0;
  double s = 0.0;
  for (int i = 0; i < v.size(); ++i)
    s += v.grid->quad_w[i] * std::pow(std::abs(v[i]) / m, p);
  return m * std::pow(s, 1.0 / p);
}

//! kappa_0 = min{ 6^{2/(q-2*)}, 1/(C0 sqrt(18)) }  (power model)
//! kappa_1 = min{ 1/3, (1/(18 C1^2))^{(2*-q)/(2*-q+1)} }  (saturable model)
inline double kappa_threshold_formula(const ModelSpec& spec, double measured_constant) {
  if (!(measured_constant > 0.0))
    throw ConfigError("kappa threshold formula: measured constant must be positive");
  const double two_star = spec.critical_exponent();
  if (spec.model == Model::PowerQ) {
    const double a = std::pow(6.0, 2.0 / (spec.q - two_star));
    const double b = 1.0 / (measured_constant * std::sqrt(18.0));
    return std::min(a, b);
  }
  const double e = (two_star - spec.q) / (two_star - spec.q + 1.0);
  const double b = std::pow(1.0 / (18.0 * measured_constant * measured_constant), e);
  return std::min(1.0 / 3.0, b);
}

//! Scale-free residual of the dilation (Pohozaev-type) identity
//!   (N-2)/(2N) int |grad v|^2 + (V_infty/2) int G^{-1}(v)^2 - int (primitive)
//! normalized by the gradient term. Only valid for constant potentials.
inline double pohozaev_residual(const Field& v, const Field& u, const Transform& tf,
                                const PotentialSpec& pot) {
  if (!pot.is_constant())
    throw ConfigError("pohozaev: the identity applies to constant potentials only");
  GridPtr grid = v.grid;
  Field du = radial_derivative(v);
  Field du2(grid), mass(grid), nl(grid);
  for (int i = 0; i < v.size(); ++i) {
    du2.values[i] = du[i] * du[i];
    mass.values[i] = u[i] * u[i];
    nl.values[i] = tf.nonlinearity_primitive(u[i]);
  }
  const double K = integrate(du2);
  const double M = integrate(mass);
  const double P = integrate(nl);
  const double N = grid->dim;
  const double grad_term = (N - 2.0) / (2.0 * N) * K;
  return std::abs(grad_term + 0.5 * pot.v_infty * M - P) / std::max(grad_term, 1e-300);
}

struct VerifyOptions {
  double pde_residual_tol = 1e-3;       // scale-normalized, modified equation
  double original_residual_tol = 1e-3;  // scale-normalized, original equation
  double pohozaev_tol = 1e-3;
  double inequality_slack = 1e-9;  // relative slack for exact-at-criticality bounds
  double positivity_tol = 1e-12;   // relative
  double monotonicity_tol = 1e-10; // relative
  double decay_r2_min = 0.99;
};

struct MoserIterate {
  double beta = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;
};

//! Pass/fail plus residual magnitudes for every certificate.
struct VerificationReport {
  bool converged = false;

  // PDE residuals, max over interior nodes and weighted-RMS, both divided by
  // the nodal scale max(|V u| + |l(u)|)
  double residual_scale = 0.0;
  double pde_residual_max = 0.0;  // modified equation (truncated g, modified l)
  double pde_residual_l2 = 0.0;
  bool pde_pass = false;
  double original_residual_max = 0.0;  // original equation (untruncated coefficient)
  bool original_pass = false;

  double linf_v = 0.0, linf_u = 0.0;
  double linf_threshold = 0.0;
  double linf_chain_factor = 0.0;  // ||u||_inf / ||v||_inf
  bool linf_pass = false;

  double energy_bound_lhs = 0.0, energy_bound_rhs = 0.0;
  bool energy_bound_pass = false;
  std::optional<double> comparison_bound_rhs;  // with c replaced by d_infty
  bool comparison_bound_pass = false;

  bool pohozaev_applicable = false;
  double pohozaev_residual = 0.0;
  bool pohozaev_pass = false;

  bool moser_applicable = false;
  std::vector<MoserIterate> moser_chain;
  double moser_c0 = 0.0;         // composite constant of the closed-form product
  double moser_linf_bound = 0.0; // C0 kappa^{-1/4}
  bool moser_pass = false;

  bool qualitative_applicable = false;
  bool nontrivial_pass = false;
  bool positivity_pass = false;
  bool monotonicity_pass = false;
  double decay_rate = 0.0;
  double decay_fit_r2 = 0.0;
  bool decay_pass = false;

  double kappa_threshold_formula_value = 0.0;

  bool all_pass = false;  // conjunction over the applicable certificates
};

namespace detail {

// nodal residual of the modified equation (truncated g):
//   -g^2(u) lap u - g(u) g'(u) |u'|^2 + V u - l(u)
inline Field modified_equation_residual(const Transform& tf, const Field& u, const Field& V) {
  Field lap = laplacian_apply(u);
  Field du = radial_derivative(u);
  Field res(u.grid);
  for (int i = 0; i < u.size(); ++i) {
    const double g = tf.g(u[i]);
    const double gp = tf.g_derivative(u[i]);
    res.values[i] =
        -g * g * lap[i] - g * gp * du[i] * du[i] + V[i] * u[i] - tf.nonlinearity(u[i]);
  }
  return res;
}

// nodal residual of the original quasilinear equation, written without the
// square root so it stays defined where 1 - kappa u^2 < 0:
//   -(1 - kappa u^2) lap u + kappa u |u'|^2 + V u - rho(u)
// with rho the untruncated nonlinearity of the model.
inline Field original_equation_residual(const ModelSpec& spec, const Field& u,
                                        const Field& V) {
  Field lap = laplacian_apply(u);
  Field du = radial_derivative(u);
  Field res(u.grid);
  const double k = spec.kappa;
  for (int i = 0; i < u.size(); ++i) {
    const double x = u[i];
    double rho;
    if (spec.model == Model::PowerQ)
      rho = x == 0.0 ? 0.0 : std::pow(std::abs(x), spec.q - 2.0) * x;
    else {
      const double w = 1.0 + x * x;
      rho = (1.0 - 1.0 / (w * w * w)) * x;
    }
    res.values[i] =
        -(1.0 - k * x * x) * lap[i] + k * x * du[i] * du[i] + V[i] * x - rho;
  }
  return res;
}

struct LineFit {
  double slope = 0.0, intercept = 0.0, r2 = 0.0;
  int points = 0;
};

inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  LineFit f;
  f.points = static_cast<int>(x.size());
  if (f.points < 2) return f;
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (int i = 0; i < f.points; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
    syy += y[i] * y[i];
  }
  const double n = f.points;
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) return f;
  f.slope = (n * sxy - sx * sy) / denom;
  f.intercept = (sy - f.slope * sx) / n;
  double ss_res = 0.0, ss_tot = 0.0;
  const double ybar = sy / n;
  for (int i = 0; i < f.points; ++i) {
    const double fit = f.slope * x[i] + f.intercept;
    ss_res += (y[i] - fit) * (y[i] - fit);
    ss_tot += (y[i] - ybar) * (y[i] - ybar);
  }
  f.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return f;
}

}  // namespace detail

//! Runs every applicable certificate on a computed solution. Pure and
//! deterministic: re-running on a deserialized solution reproduces the
//! report bit-identically.
inline VerificationReport verify_solution(const Solution& sol,
                                          const VerifyOptions& opt = VerifyOptions{}) {
  VerificationReport rep;
  const ModelSpec& spec = sol.model;
  Transform tf(spec);
  GridPtr grid = sol.v.grid;
  const int n = grid->nodes;
  Field V = potential_eval(sol.potential, grid);

  rep.converged = sol.converged;

  // --- PDE residuals -------------------------------------------------------
  {
    Field res_mod = detail::modified_equation_residual(tf, sol.u, V);
    Field res_orig = detail::original_equation_residual(spec, sol.u, V);
    double scale = 0.0;
    for (int i = 0; i < n; ++i)
      scale = std::max(scale,
                       std::abs(V[i] * sol.u[i]) + std::abs(tf.nonlinearity(sol.u[i])));
    if (scale == 0.0) scale = 1.0;
    rep.residual_scale = scale;
    double mx = 0.0, mo = 0.0;
    Field sq(grid);
    for (int i = 1; i + 1 < n; ++i) {  // interior nodes only
      mx = std::max(mx, std::abs(res_mod[i]));
      mo = std::max(mo, std::abs(res_orig[i]));
      sq.values[i] = res_mod[i] * res_mod[i];
    }
    const double volume = std::pow(grid->radius, grid->dim) * grid->sphere_area / grid->dim;
    rep.pde_residual_max = mx / scale;
    rep.pde_residual_l2 = std::sqrt(integrate(sq) / volume) / scale;
    rep.original_residual_max = mo / scale;
    rep.pde_pass = rep.pde_residual_max <= opt.pde_residual_tol;
    rep.original_pass = rep.original_residual_max <= opt.original_residual_tol;
  }

  // --- L-infinity thresholds ----------------------------------------------
  {
    rep.linf_v = max_abs(sol.v);
    rep.linf_u = max_abs(sol.u);
    rep.linf_chain_factor = rep.linf_v > 0.0 ? rep.linf_u / rep.linf_v : 1.0;
    if (spec.model == Model::PowerQ) {
      rep.linf_threshold = spec.is_semilinear()
                               ? std::numeric_limits<double>::infinity()
                               : std::sqrt(1.0 / (3.0 * spec.kappa));
      rep.linf_pass = rep.linf_u < rep.linf_threshold;
    } else {
      rep.linf_threshold = 1.0;
      rep.linf_pass = rep.linf_u <= rep.linf_threshold * (1.0 + opt.inequality_slack);
    }
  }

  // --- energy bound ||v||^2 <= 2 q c / (q - 2) -----------------------------
  {
    const double c = sol.energy.mp_level;
    rep.energy_bound_rhs = 2.0 * spec.q * c / (spec.q - 2.0);
    rep.energy_bound_lhs = spec.model == Model::Saturable ? kinetic_integral(sol.v)
                                                          : h1_norm_sq(sol.v, V);
    rep.energy_bound_pass =
        rep.energy_bound_lhs <=
        rep.energy_bound_rhs * (1.0 + opt.inequality_slack) + opt.inequality_slack;
    if (sol.energy.comparison_level) {
      const double d = *sol.energy.comparison_level;
      rep.comparison_bound_rhs = 2.0 * spec.q * d / (spec.q - 2.0);
      rep.comparison_bound_pass =
          rep.energy_bound_lhs <=
          *rep.comparison_bound_rhs * (1.0 + opt.inequality_slack) + opt.inequality_slack;
    }
  }

  // --- Pohozaev identity (constant potential only) -------------------------
  rep.pohozaev_applicable = sol.potential.is_constant();
  if (rep.pohozaev_applicable) {
    rep.pohozaev_residual = pohozaev_residual(sol.v, sol.u, tf, sol.potential);
    rep.pohozaev_pass = rep.pohozaev_residual <= opt.pohozaev_tol;
  }

  // --- Moser iteration chain (power model, kappa in the admissible window) --
  {
    const double two_star = spec.critical_exponent();
    rep.moser_applicable = spec.model == Model::PowerQ && spec.kappa > 0.0 &&
                           spec.kappa <= std::pow(6.0, 2.0 / (spec.q - two_star));
    if (rep.moser_applicable) {
      const double q = spec.q;
      const double q1 = two_star / (two_star - q + 2.0);  // 1/q1 + (q-2)/2* = 1
      const double sigma = two_star / (2.0 * q1);
      const double theta = (two_star - q) / 4.0;
      const double S = sobolev_constant(grid->dim);
      const double norm_2star = lp_norm(sol.v, two_star);
      double beta = 1.0;
      bool ok = true;
      for (int it = 0; it < 3; ++it) {
        beta *= sigma;
        MoserIterate mi;
        mi.beta = beta;
        mi.lhs = lp_norm(sol.v, beta * two_star);
        mi.rhs = std::pow(beta, 1.0 / beta) *
                 std::pow(std::pow(6.0, 0.5 * (q - 1.0)) * S *
                              std::pow(spec.kappa, -theta) * std::pow(norm_2star, q - 2.0),
                          0.5 / beta) *
                 lp_norm(sol.v, 2.0 * beta * q1);
        mi.pass = mi.lhs <= mi.rhs * (1.0 + opt.inequality_slack);
        ok = ok && mi.pass;
        rep.moser_chain.push_back(mi);
      }
      // composite constant of the final closed-form display; C from the
      // kappa-free level bound ||v||^2 <= 2 q d_infty / (q - 2)
      const double level = sol.energy.comparison_level.value_or(sol.energy.mp_level);
      const double C = 2.0 * q * level / (q - 2.0);
      rep.moser_c0 = std::pow(sigma, 1.0 / ((sigma - 1.0) * (sigma - 1.0))) *
                     std::pow(std::pow(6.0, 0.5 * (q - 1.0)) * std::pow(S, 0.5 * q) *
                                  std::pow(C, 0.5 * (q - 2.0)),
                              0.5 / (sigma - 1.0)) *
                     std::sqrt(S) * std::sqrt(C);
      rep.moser_linf_bound = rep.moser_c0 * std::pow(spec.kappa, -0.25);
      ok = ok && rep.linf_v <= rep.moser_linf_bound * (1.0 + opt.inequality_slack);
      rep.moser_pass = ok;
    }
  }

  // --- qualitative profile checks (constant potential only) ----------------
  rep.qualitative_applicable = sol.potential.is_constant();
  {
    const double umax = rep.linf_u;
    rep.nontrivial_pass = umax > 1e-10 && sol.energy.j_value > 0.0;
    double mn = 0.0;
    bool mono = true;
    for (int i = 0; i + 1 < n; ++i) {
      mn = std::min(mn, sol.u[i]);
      if (sol.u[i + 1] > sol.u[i] + opt.monotonicity_tol * std::max(1.0, umax))
        mono = false;
    }
    rep.positivity_pass =
        umax > 0.0 && sol.u[0] > 0.0 && mn >= -opt.positivity_tol * std::max(1.0, umax);
    rep.monotonicity_pass = mono;
    // exponential decay fit over the outer third of the resolved support,
    // keeping clear of the Dirichlet boundary layer (width ~ 2 / decay rate)
    double r_support = 0.0;
    for (int i = 0; i < n; ++i)
      if (sol.u[i] > 1e-10 * umax) r_support = grid->r[i];
    const double mu = std::sqrt(std::max(sol.potential.v_infty, 1e-10));
    const double r_hi = std::min(r_support, grid->radius - 2.0 / mu);
    std::vector<double> xs, ys;
    for (int i = 0; i < n; ++i) {
      const double r = grid->r[i];
      if (r >= 2.0 / 3.0 * r_hi && r <= r_hi && sol.u[i] > 1e-13 * umax) {
        xs.push_back(r);
        ys.push_back(std::log(sol.u[i]));
      }
    }
    const auto fit = detail::fit_line(xs, ys);
    rep.decay_rate = -fit.slope;
    rep.decay_fit_r2 = fit.r2;
    rep.decay_pass = fit.points >= 8 && rep.decay_rate > 0.0 && fit.r2 >= opt.decay_r2_min;
  }

  // --- threshold formula ----------------------------------------------------
  if (!spec.is_semilinear()) {
    double constant;
    if (spec.model == Model::PowerQ) {
      constant = rep.moser_c0;
    } else {
      // saturable analogue of the composite: 3^q sqrt(2) replaces 6^{(q-1)/2}
      const double two_star = spec.critical_exponent();
      const double q = spec.q;
      const double q1 = two_star / (two_star - q + 2.0);
      const double sigma = two_star / (2.0 * q1);
      const double S = sobolev_constant(grid->dim);
      const double level = sol.energy.comparison_level.value_or(sol.energy.mp_level);
      const double C = 2.0 * q * level / (q - 2.0);
      constant = std::pow(sigma, 1.0 / ((sigma - 1.0) * (sigma - 1.0))) *
                 std::pow(std::pow(3.0, q) * std::sqrt(2.0) * std::pow(S, 0.5 * q) *
                              std::pow(C, 0.5 * (q - 2.0)),
                          0.5 / (sigma - 1.0)) *
                 std::sqrt(S) * std::sqrt(C);
    }
    if (constant > 0.0)
      rep.kappa_threshold_formula_value = kappa_threshold_formula(spec, constant);
  }

  // --- overall --------------------------------------------------------------
  bool all = rep.converged && rep.linf_pass && rep.pde_pass && rep.original_pass &&
             rep.energy_bound_pass;
  if (rep.pohozaev_applicable) all = all && rep.pohozaev_pass;
  if (rep.moser_applicable) all = all && rep.moser_pass;
  if (rep.qualitative_applicable)
    all = all && rep.nontrivial_pass && rep.positivity_pass && rep.monotonicity_pass &&
          rep.decay_pass;
  rep.all_pass = all;
  return rep;
}

}  // namespace qls
