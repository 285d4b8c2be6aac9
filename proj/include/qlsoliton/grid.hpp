#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "qlsoliton/errors.hpp"

namespace qls {

//! Uniform radial grid on [0, R] for radial functions of N variables.
//!
//! Two weight sets coexist:
//!  - quad_w: product-trapezoid weights for the measure omega_{N-1} r^{N-1} dr
//!    (each weight is the exact hat-function integral, so constants integrate
//!    exactly; used by integrate() and all certificate integrals).
//!  - var_w: variational weights that make the collocation Laplacian
//!    self-adjoint. For N = 3 they are exactly omega h r^2 with zero weight at
//!    the axis node, and the discrete energies built on them have the
//!    collocation strong form as their exact nodal gradient. Used by the
//!    solver's inner products only.
struct RadialGrid {
  int dim = 3;
  double radius = 1.0;
  int nodes = 0;
  double spacing = 0.0;
  double sphere_area = 0.0;  // omega_{N-1} = 2 pi^{N/2} / Gamma(N/2)
  std::vector<double> r;
  std::vector<double> quad_w;
  std::vector<double> var_w;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

inline GridPtr make_grid(int dim, double radius, int nodes) {
  if (dim < 3) throw ConfigError("grid: dim must be >= 3");
  if (nodes < 16) throw ConfigError("grid: need at least 16 nodes");
  if (!(radius > 0.0)) throw ConfigError("grid: radius must be positive");
  auto g = std::make_shared<RadialGrid>();
  const int N = dim;
  g->dim = dim;
  g->radius = radius;
  g->nodes = nodes;
  g->spacing = radius / (nodes - 1);
  g->sphere_area = 2.0 * std::pow(M_PI, 0.5 * N) / std::tgamma(0.5 * N);
  g->r.resize(nodes);
  g->quad_w.assign(nodes, 0.0);
  for (int i = 0; i < nodes; ++i) g->r[i] = i * g->spacing;
  const double h = g->spacing;
  auto powint = [](double x, int k) {
    double p = 1.0;
    for (int j = 0; j < k; ++j) p *= x;
    return p;
  };
  for (int i = 0; i + 1 < nodes; ++i) {
    const double a = g->r[i], b = g->r[i + 1];
    const double pN = (powint(b, N) - powint(a, N)) / N;                 // int r^{N-1}
    const double pN1 = (powint(b, N + 1) - powint(a, N + 1)) / (N + 1);  // int r^N
    g->quad_w[i] += (b * pN - pN1) / h;
    g->quad_w[i + 1] += (pN1 - a * pN) / h;
  }
  for (auto& w : g->quad_w) w *= g->sphere_area;

  // variational weights: w_{i+1}/w_i = (1 + (N-1)/(2i)) / (1 - (N-1)/(2(i+1)))
  // symmetrizes the interior collocation rows; the first nodes where the
  // denominator is nonpositive carry zero weight (their rows act as
  // regularity/definition rows). Normalized to omega h r^{N-1} at the
  // outermost interior node; for N = 3 this gives exactly omega h r_i^2.
  g->var_w.assign(nodes, 0.0);
  int anchor = 1;
  while (2 * (anchor + 1) <= N - 1) ++anchor;
  g->var_w[anchor] = 1.0;
  for (int i = anchor; i + 2 < nodes; ++i) {
    const double num = 1.0 + 0.5 * (N - 1) / i;
    const double den = 1.0 - 0.5 * (N - 1) / (i + 1);
    g->var_w[i + 1] = g->var_w[i] * num / den;
  }
  const int last = nodes - 2;
  const double scale = g->sphere_area * h * powint(g->r[last], N - 1) / g->var_w[last];
  for (int i = anchor; i <= last; ++i) g->var_w[i] *= scale;
  g->var_w[nodes - 1] = 0.0;  // Dirichlet node
  return g;
}

//! Nodal values of a radial function on a shared grid.
struct Field {
  GridPtr grid;
  std::vector<double> values;

  Field() = default;
  explicit Field(GridPtr g, double fill = 0.0)
      : grid(std::move(g)), values(grid->nodes, fill) {}

  int size() const { return static_cast<int>(values.size()); }
  double& operator[](int i) { return values[i]; }
  double operator[](int i) const { return values[i]; }
};

//! int_{R^N} w dx = int_0^R w(r) omega_{N-1} r^{N-1} dr by the grid weights.
inline double integrate(const Field& w) {
  double s = 0.0;
  for (int i = 0; i < w.size(); ++i) s += w.grid->quad_w[i] * w.values[i];
  return s;
}

inline double integrate_product(const Field& a, const Field& b) {
  double s = 0.0;
  for (int i = 0; i < a.size(); ++i) s += a.grid->quad_w[i] * a.values[i] * b.values[i];
  return s;
}

//! Inner product under the variational weights; the pairing in which the
//! discrete energy gradients are exact.
inline double variational_inner(const Field& a, const Field& b) {
  double s = 0.0;
  for (int i = 0; i < a.size(); ++i) s += a.grid->var_w[i] * a.values[i] * b.values[i];
  return s;
}

//! Centered first derivative dv/dr; zero at r = 0 (radial regularity),
//! one-sided second-order at r = R.
inline Field radial_derivative(const Field& v) {
  const auto& g = *v.grid;
  const int n = g.nodes;
  const double h = g.spacing;
  Field d(v.grid);
  d.values[0] = 0.0;
  for (int i = 1; i + 1 < n; ++i) d.values[i] = (v[i + 1] - v[i - 1]) / (2.0 * h);
  d.values[n - 1] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h);
  return d;
}

//! Second-order discrete Laplacian v'' + (N-1)/r v'.
//! At r = 0 the regularity limit lap v(0) = N v''(0) is used with the ghost
//! reflection v(-h) = v(h) encoding v'(0) = 0. The last node uses a linearly
//! extrapolated ghost; only interior values carry the O(h^2) guarantee.
inline Field laplacian_apply(const Field& v) {
  const auto& g = *v.grid;
  const int n = g.nodes;
  const double h = g.spacing;
  const double h2 = h * h;
  const int N = g.dim;
  Field out(v.grid);
  out.values[0] = N * 2.0 * (v[1] - v[0]) / h2;
  for (int i = 1; i + 1 < n; ++i) {
    const double d2 = (v[i + 1] - 2.0 * v[i] + v[i - 1]) / h2;
    const double d1 = (v[i + 1] - v[i - 1]) / (2.0 * h);
    out.values[i] = d2 + (N - 1) * d1 / g.r[i];
  }
  const double ghost = 2.0 * v[n - 1] - v[n - 2];
  out.values[n - 1] = (ghost - 2.0 * v[n - 1] + v[n - 2]) / h2 +
                      (N - 1) * (ghost - v[n - 2]) / (2.0 * h * g.r[n - 1]);
  return out;
}

namespace detail {

// Tridiagonal coefficients of the variational form of -lap: rows with
// positive weight are symmetrized (exactly the collocation rows for N = 3),
// zero-weight rows are the collocation regularity rows verbatim.
struct LaplacianRows {
  std::vector<double> sub, diag, sup;
};

inline LaplacianRows variational_laplacian_rows(const RadialGrid& g) {
  const int n = g.nodes;
  const double h2 = g.spacing * g.spacing;
  const int N = g.dim;
  LaplacianRows rows;
  rows.sub.assign(n, 0.0);
  rows.diag.assign(n, 0.0);
  rows.sup.assign(n, 0.0);
  auto m_sub = [&](int i) { return -(1.0 - 0.5 * (N - 1) / i) / h2; };
  auto m_sup = [&](int i) { return -(1.0 + 0.5 * (N - 1) / i) / h2; };
  for (int i = 0; i + 1 < n; ++i) {
    if (g.var_w[i] == 0.0) {
      if (i == 0) {
        rows.diag[0] = 2.0 * N / h2;
        rows.sup[0] = -2.0 * N / h2;
      } else {
        rows.sub[i] = m_sub(i);
        rows.diag[i] = 2.0 / h2;
        rows.sup[i] = m_sup(i);
      }
      continue;
    }
    rows.diag[i] = 2.0 / h2;
    const double wl = i > 0 ? g.var_w[i - 1] : 0.0;
    rows.sub[i] =
        i > 0 ? 0.5 * (m_sub(i) + (wl > 0.0 ? m_sup(i - 1) * wl / g.var_w[i] : 0.0)) : 0.0;
    const double wr = g.var_w[i + 1];
    rows.sup[i] = 0.5 * (m_sup(i) + (wr > 0.0 ? m_sub(i + 1) * wr / g.var_w[i] : 0.0));
  }
  rows.diag[n - 1] = 1.0;  // Dirichlet row
  return rows;
}

}  // namespace detail

//! Action of the variational -lap operator (field form). For N = 3 this is
//! the plain collocation -lap at every row except the Dirichlet node.
inline Field apply_neg_laplacian(const Field& v) {
  const auto rows = detail::variational_laplacian_rows(*v.grid);
  const int n = v.grid->nodes;
  Field out(v.grid);
  for (int i = 0; i + 1 < n; ++i) {
    double s = rows.diag[i] * v[i];
    if (i > 0) s += rows.sub[i] * v[i - 1];
    s += rows.sup[i] * v[i + 1];
    out.values[i] = s;
  }
  out.values[n - 1] = 0.0;
  return out;
}

//! Solves (a T + diag(c)) d = rhs with d(R) = 0 by the Thomas algorithm,
//! where T is the variational -lap operator above. For c > 0 the operator is
//! positive definite under the variational pairing; indefinite c (Newton
//! systems) is also accepted.
inline Field solve_shifted_laplacian(const Field& c, const Field& rhs, double lap_coeff = 1.0) {
  const auto& g = *rhs.grid;
  const int n = g.nodes;
  auto rows = detail::variational_laplacian_rows(g);
  std::vector<double> diag(n), b(n);
  for (int i = 0; i + 1 < n; ++i) {
    rows.sub[i] *= lap_coeff;
    rows.sup[i] *= lap_coeff;
    diag[i] = lap_coeff * rows.diag[i] + c[i];
    b[i] = rhs[i];
  }
  diag[n - 1] = 1.0;
  rows.sub[n - 1] = 0.0;
  b[n - 1] = 0.0;
  for (int i = 1; i < n; ++i) {
    if (std::abs(diag[i - 1]) < 1e-300)
      throw NumericsError("solve_shifted_laplacian: vanishing pivot");
    const double m = rows.sub[i] / diag[i - 1];
    diag[i] -= m * rows.sup[i - 1];
    b[i] -= m * b[i - 1];
  }
  Field d(rhs.grid);
  d.values[n - 1] = b[n - 1] / diag[n - 1];
  for (int i = n - 2; i >= 0; --i) d.values[i] = (b[i] - rows.sup[i] * d.values[i + 1]) / diag[i];
  return d;
}

inline double max_abs(const Field& v) {
  double m = 0.0;
  for (double x : v.values) m = std::max(m, std::abs(x));
  return m;
}

// ---------------------------------------------------------------------------
// Potential
// ---------------------------------------------------------------------------

enum class PotentialShape { Constant, GaussianWell };

//! V(r) = v_infty - depth * exp(-(r/width)^2); Constant is depth = 0.
//! Satisfies (V0): V >= v0 = v_infty - depth > 0 and (V1): V <= v_infty.
struct PotentialSpec {
  PotentialShape shape = PotentialShape::Constant;
  double v_infty = 1.0;
  double well_depth = 0.0;
  double well_width = 1.0;

  double floor() const {
    return shape == PotentialShape::Constant ? v_infty : v_infty - well_depth;
  }
  bool is_constant() const {
    return shape == PotentialShape::Constant || well_depth == 0.0;
  }

  double operator()(double r) const {
    if (is_constant()) return v_infty;
    const double x = r / well_width;
    return v_infty - well_depth * std::exp(-x * x);
  }

  static PotentialSpec constant(double v_infty) {
    PotentialSpec p;
    p.v_infty = v_infty;
    p.validate(false);
    return p;
  }
  static PotentialSpec gaussian_well(double v_infty, double depth, double width) {
    PotentialSpec p;
    p.shape = PotentialShape::GaussianWell;
    p.v_infty = v_infty;
    p.well_depth = depth;
    p.well_width = width;
    p.validate(false);
    return p;
  }

  void validate(bool saturable) const {
    if (!(v_infty > 0.0)) throw ConfigError("potential: v_infty must be positive");
    if (shape == PotentialShape::GaussianWell) {
      if (!(well_depth >= 0.0 && well_depth < v_infty))
        throw ConfigError("potential: well depth must lie in [0, v_infty)");
      if (!(well_width > 0.0)) throw ConfigError("potential: well width must be positive");
    }
    if (saturable && !(floor() >= 1.0))
      throw ConfigError("potential: saturable model requires V0 >= 1, got V0 = " +
                        std::to_string(floor()));
  }
};

//! Nodal potential values. Rejects grids too short for the well to have
//! flattened out: the tail must match v_infty within 1e-8 relative at r = R.
inline Field potential_eval(const PotentialSpec& spec, GridPtr grid) {
  if (!spec.is_constant()) {
    const double tail = spec.v_infty - spec(grid->radius);
    if (tail > 1e-8 * spec.v_infty)
      throw ConfigError("potential: V(R) does not reach v_infty within 1e-8 relative; "
                        "increase the radius or narrow the well");
  }
  Field V(grid);
  for (int i = 0; i < V.size(); ++i) V.values[i] = spec(grid->r[i]);
  return V;
}

}  // namespace qls
