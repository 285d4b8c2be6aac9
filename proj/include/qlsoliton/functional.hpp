#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>

#include "qlsoliton/grid.hpp"
#include "qlsoliton/transforms.hpp"

namespace qls {

//! Quadrature of int |grad v|^2 as the quadratic form of the variational
//! Laplacian; exact counterpart of the discrete energies below. Requires
//! v(R) = 0 for the integration-by-parts interpretation.
inline double kinetic_integral(const Field& v) {
  return variational_inner(apply_neg_laplacian(v), v);
}

//! Discrete norm ||v||^2 = int |grad v|^2 + int V v^2 in the variational
//! quadrature; this is the norm used by the solver and the energy bounds.
inline double h1_norm_sq(const Field& v, const Field& V) {
  double s = kinetic_integral(v);
  for (int i = 0; i < v.size(); ++i) s += v.grid->var_w[i] * V[i] * v[i] * v[i];
  return s;
}

inline double h1_norm(const Field& v, const Field& V) { return std::sqrt(h1_norm_sq(v, V)); }

// ---------------------------------------------------------------------------
// Transformed-variable energies
// ---------------------------------------------------------------------------

//! J(v)  = 1/2 int |grad v|^2 + 1/2 int V G^{-1}(v)^2 - 1/q int |G^{-1}(v)|^q
//! Jt(v) = 1/2 int |grad v|^2 + 1/2 int V G^{-1}(v)^2 - int F(G^{-1}(v))
//! selected by the model in the transform. Requires v(R) = 0. The gradient
//! below is the exact derivative of this discrete value under the
//! variational pairing.
inline double energy(const Transform& tf, const Field& v, const Field& V) {
  double e = 0.5 * kinetic_integral(v);
  for (int i = 0; i < v.size(); ++i) {
    const double w = v.grid->var_w[i];
    if (w == 0.0) continue;
    const double u = tf.G_inverse(v[i]);
    e += w * (0.5 * V[i] * u * u - tf.nonlinearity_primitive(u));
  }
  return e;
}

//! Strong-form residual of the transformed equation,
//!   -lap v + V G^{-1}(v)/g(G^{-1}(v)) - l(G^{-1}(v))/g(G^{-1}(v)).
//! For N = 3 every row is the collocation operator itself (the r = 0 row is
//! the regularity row), and <gradient, psi> under the variational pairing is
//! the exact directional derivative of energy() for psi with psi(R) = 0.
inline Field gradient(const Transform& tf, const Field& v, const Field& V) {
  Field out = apply_neg_laplacian(v);
  for (int i = 0; i + 1 < v.size(); ++i) {
    const double u = tf.G_inverse(v[i]);
    const double gv = tf.g(u);
    out.values[i] += V[i] * u / gv - tf.nonlinearity(u) / gv;
  }
  out.values[v.size() - 1] = 0.0;
  return out;
}

//! Diagonal of d(gradient)/dv excluding the Laplacian part:
//!   V h'(v) - l'(v)  with  h(v) = G^{-1}(v)/g(G^{-1}(v)).
inline Field gradient_jacobian_diag(const Transform& tf, const Field& v, const Field& V) {
  Field out(v.grid);
  for (int i = 0; i < v.size(); ++i) {
    const double u = tf.G_inverse(v[i]);
    const double gv = tf.g(u);
    const double gp = tf.g_derivative(u);
    const double g3 = gv * gv * gv;
    const double hp = (gv - u * gp) / g3;
    const double lp = (tf.nonlinearity_derivative(u) * gv - tf.nonlinearity(u) * gp) / g3;
    out.values[i] = V[i] * hp - lp;
  }
  return out;
}

//! Original-variable energy I(u) of the modified problem,
//! 1/2 int g^2(u)|grad u|^2 + 1/2 int V u^2 - int (nonlinear primitive),
//! by the certificate quadrature (hat weights, centered derivative).
//! Agrees with energy(G(u)) up to O(h^2); reported for cross-checking.
inline double energy_original(const Transform& tf, const Field& u, const Field& V) {
  Field du = radial_derivative(u);
  double e = 0.0;
  for (int i = 0; i < u.size(); ++i) {
    const double gu = tf.g(u[i]);
    e += u.grid->quad_w[i] * (0.5 * gu * gu * du[i] * du[i] + 0.5 * V[i] * u[i] * u[i] -
                              tf.nonlinearity_primitive(u[i]));
  }
  return e;
}

// ---------------------------------------------------------------------------
// Comparison functionals
// ---------------------------------------------------------------------------

//! P_infty(v) = 3 int (|grad v|^2 + V_infty v^2) - 1/q int |v|^q.
inline double energy_p_infty(const Field& v, double v_infty, double q) {
  double e = 3.0 * kinetic_integral(v);
  for (int i = 0; i < v.size(); ++i) {
    const double x = v[i];
    e += v.grid->var_w[i] * (3.0 * v_infty * x * x - std::pow(std::abs(x), q) / q);
  }
  return e;
}

//! Q_infty(v) = 1/2 int |grad v|^2 + (9 V_infty/2) int v^2 - int F(v).
inline double energy_q_infty(const Transform& tf, const Field& v, double v_infty) {
  double e = 0.5 * kinetic_integral(v);
  for (int i = 0; i < v.size(); ++i) {
    const double x = v[i];
    e += v.grid->var_w[i] * (4.5 * v_infty * x * x - tf.nonlinearity_primitive(x));
  }
  return e;
}

//! J with V replaced by the constant V_infty.
inline double energy_j_infty(const Transform& tf, const Field& v, double v_infty) {
  Field V(v.grid, v_infty);
  return energy(tf, v, V);
}

//! J_infty along the dilation path gamma(t) = v(./t): the gradient term
//! scales as t^{N-2}, mass and nonlinear terms as t^N.
inline double dilation_energy(const Transform& tf, const Field& v, double v_infty, double t) {
  if (!(t > 0.0)) throw std::domain_error("dilation_energy: t must be positive");
  const int N = v.grid->dim;
  const double K = kinetic_integral(v);
  double M = 0.0, P = 0.0;
  for (int i = 0; i < v.size(); ++i) {
    const double u = tf.G_inverse(v[i]);
    M += v.grid->var_w[i] * u * u;
    P += v.grid->var_w[i] * tf.nonlinearity_primitive(u);
  }
  return 0.5 * std::pow(t, N - 2) * K + std::pow(t, N) * (0.5 * v_infty * M - P);
}

// ---------------------------------------------------------------------------
// Generic variational problem handed to the mountain-pass machinery
// ---------------------------------------------------------------------------

struct VariationalProblem {
  GridPtr grid;
  Field precond_V;        // potential of the quadratic part, defines the metric
  double lap_coeff = 1.0; // its Laplacian coefficient
  std::function<double(const Field&)> energy;
  std::function<Field(const Field&)> gradient;
  std::function<Field(const Field&)> jacobian_diag;  // excludes the Laplacian part
};

//! The main transformed problem J (power/semilinear) or Jt (saturable).
inline VariationalProblem make_transformed_problem(const Transform& tf, const Field& V) {
  VariationalProblem p;
  p.grid = V.grid;
  p.precond_V = V;
  p.lap_coeff = 1.0;
  p.energy = [tf, V](const Field& v) { return energy(tf, v, V); };
  p.gradient = [tf, V](const Field& v) { return gradient(tf, v, V); };
  p.jacobian_diag = [tf, V](const Field& v) { return gradient_jacobian_diag(tf, v, V); };
  return p;
}

inline VariationalProblem make_p_infty_problem(double q, GridPtr grid, double v_infty) {
  VariationalProblem p;
  p.grid = grid;
  p.precond_V = Field(grid, 6.0 * v_infty);
  p.lap_coeff = 6.0;
  p.energy = [v_infty, q](const Field& v) { return energy_p_infty(v, v_infty, q); };
  p.gradient = [v_infty, q](const Field& v) {
    Field out = apply_neg_laplacian(v);
    for (int i = 0; i + 1 < v.size(); ++i) {
      out.values[i] = 6.0 * out.values[i] + 6.0 * v_infty * v[i] -
                      (v[i] == 0.0 ? 0.0 : std::pow(std::abs(v[i]), q - 2.0) * v[i]);
    }
    out.values[v.size() - 1] = 0.0;
    return out;
  };
  p.jacobian_diag = [v_infty, q](const Field& v) {
    Field out(v.grid);
    for (int i = 0; i < v.size(); ++i)
      out.values[i] =
          6.0 * v_infty - (v[i] == 0.0 ? 0.0 : (q - 1.0) * std::pow(std::abs(v[i]), q - 2.0));
    return out;
  };
  return p;
}

inline VariationalProblem make_q_infty_problem(const Transform& tf, GridPtr grid,
                                               double v_infty) {
  VariationalProblem p;
  p.grid = grid;
  p.precond_V = Field(grid, 9.0 * v_infty);
  p.lap_coeff = 1.0;
  p.energy = [tf, v_infty](const Field& v) { return energy_q_infty(tf, v, v_infty); };
  p.gradient = [tf, v_infty](const Field& v) {
    Field out = apply_neg_laplacian(v);
    for (int i = 0; i + 1 < v.size(); ++i)
      out.values[i] += 9.0 * v_infty * v[i] - tf.nonlinearity(v[i]);
    out.values[v.size() - 1] = 0.0;
    return out;
  };
  p.jacobian_diag = [tf, v_infty](const Field& v) {
    Field out(v.grid);
    for (int i = 0; i < v.size(); ++i)
      out.values[i] = 9.0 * v_infty - tf.nonlinearity_derivative(v[i]);
    return out;
  };
  return p;
}

//! Dual norm of the gradient in the problem metric: the Sobolev gradient d
//! solves (a T + V) d = grad, and ||J'|| = sqrt(<grad, d>) under the
//! variational pairing.
inline double gradient_dual_norm(const VariationalProblem& p, const Field& grad) {
  Field d = solve_shifted_laplacian(p.precond_V, grad, p.lap_coeff);
  const double s = variational_inner(grad, d);
  return std::sqrt(std::max(0.0, s));
}

//! Energy/criticality data attached to a converged solution.
struct EnergyReport {
  double j_value = 0.0;   // J (or Jt) at the solution
  double i_value = 0.0;   // original-variable I at u (cross-check, O(h^2) apart)
  double grad_norm = 0.0; // dual norm of the gradient at the solution
  double mp_level = 0.0;  // c_kappa estimate: max energy along the final path
  std::optional<double> comparison_level;  // d_infty from P_infty / Q_infty
};

}  // namespace qls
