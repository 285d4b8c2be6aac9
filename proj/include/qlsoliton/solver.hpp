#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qlsoliton/functional.hpp"
#include "qlsoliton/grid.hpp"
#include "qlsoliton/model.hpp"
#include "qlsoliton/transforms.hpp"

namespace qls {

struct SolverConfig {
  ModelSpec model;
  PotentialSpec potential;
  int grid_nodes = 2001;
  double radius = 20.0;
  bool adaptive_radius = true;
  int path_points = 33;
  double descent_tol = 1e-8;
  int max_iters = 20000;
  double seed_amplitude = 1.0;
  bool compute_comparison_level = true;

  void validate() const {
    model.validate();
    potential.validate(model.model == Model::Saturable);
    if (grid_nodes < 16) throw ConfigError("solver: grid_nodes must be >= 16");
    if (!(radius > 0.0)) throw ConfigError("solver: radius must be positive");
    if (path_points < 3) throw ConfigError("solver: path_points must be >= 3");
    if (!(descent_tol > 0.0)) throw ConfigError("solver: descent_tol must be positive");
    if (max_iters < 1) throw ConfigError("solver: max_iters must be >= 1");
    if (!(seed_amplitude > 0.0)) throw ConfigError("solver: seed_amplitude must be positive");
  }
};

struct PathTracePoint {
  int iteration;
  double path_max_energy;
};

struct Solution {
  ModelSpec model;
  PotentialSpec potential;
  Field v;  // transformed profile, v(R) = 0
  Field u;  // physical profile u = G^{-1}(v)
  EnergyReport energy;
  int iterations = 0;
  bool converged = false;
  std::vector<PathTracePoint> path_trace;
};

//! u = G^{-1}(v) applied nodewise; preserves sign, monotonicity, boundary zero.
inline Field recover_u(const Transform& tf, const Field& v) {
  Field u(v.grid);
  for (int i = 0; i < v.size(); ++i) u.values[i] = tf.G_inverse(v[i]);
  return u;
}

//! Smooth compactly supported bump, supp = closed ball of radius support,
//! normalized to amplitude at the origin.
inline Field bump_field(GridPtr grid, double amplitude, double support = 1.0) {
  Field phi(grid);
  for (int i = 0; i < phi.size(); ++i) {
    const double x = grid->r[i] / support;
    if (x < 1.0) phi.values[i] = amplitude * std::exp(1.0 - 1.0 / (1.0 - x * x));
  }
  return phi;
}

//! Bump direction used for the path endpoint. A support of a few length
//! units keeps the negative-energy crossing amplitude moderate even for
//! weakly superquadratic nonlinearities (q near 2).
inline Field endpoint_bump(GridPtr grid) {
  return bump_field(grid, 1.0, std::min(4.0, 0.25 * grid->radius));
}

//! Endpoint e = t phi with the dilation t doubled until the energy is
//! negative; terminates because the energy tends to -infinity along t phi.
//! The crossing is then bisected so the endpoint barely overshoots it, which
//! keeps the energy barrier along re-tensioned paths through e low.
inline Field initial_endpoint(const VariationalProblem& p, double seed_amplitude) {
  Field phi = endpoint_bump(p.grid);
  auto at = [&](double t) {
    Field e(p.grid);
    for (int i = 0; i < e.size(); ++i) e.values[i] = t * phi[i];
    return e;
  };
  double t = seed_amplitude;
  bool found = false;
  for (int k = 0; k < 200; ++k) {
    if (p.energy(at(t)) < 0.0) {
      found = true;
      break;
    }
    t *= 2.0;
  }
  if (!found)
    throw SolverError("initial_endpoint: energy stayed nonnegative after 200 doublings "
                      "(seed amplitude " + std::to_string(seed_amplitude) + ")");
  double lo = 0.5 * t, hi = t;
  for (int k = 0; k < 50; ++k) {
    const double mid = 0.5 * (lo + hi);
    (p.energy(at(mid)) < 0.0 ? hi : lo) = mid;
  }
  Field e = at(1.02 * hi);
  if (!(p.energy(e) < 0.0)) e = at(t);
  return e;
}

namespace detail {

inline Field axpy(const Field& x, double a, const Field& y) {  // x + a y
  Field out = x;
  for (int i = 0; i < out.size(); ++i) out.values[i] += a * y[i];
  return out;
}

inline void clamp_nonneg(Field& v) {
  for (auto& x : v.values) x = std::max(x, 0.0);
}

inline Field path_point(const Field& w, const Field& e, double s) {
  // piecewise-linear path 0 -> w -> e parameterized on [0, 1]
  Field out(w.grid);
  if (s <= 0.5) {
    const double a = 2.0 * s;
    for (int i = 0; i < out.size(); ++i) out.values[i] = a * w[i];
  } else {
    const double a = 2.0 * s - 1.0;
    for (int i = 0; i < out.size(); ++i) out.values[i] = w[i] + a * (e[i] - w[i]);
  }
  return out;
}

}  // namespace detail

struct DescentStepResult {
  Field next;
  bool accepted = false;
  double step = 0.0;
  double energy = 0.0;
};

//! One preconditioned (Sobolev-gradient) descent step with Armijo
//! backtracking; iterates are projected to v >= 0. Energy never increases.
//! max_displacement caps the sup-norm of the move; the path-deformation loop
//! uses it to keep vertices from being flung across the mountain ridge.
inline DescentStepResult descent_step(const VariationalProblem& p, const Field& v,
                                      bool project_nonneg = true, double max_step = 1.0,
                                      double max_displacement = 0.0) {
  DescentStepResult res;
  res.next = v;
  const double e0 = p.energy(v);
  res.energy = e0;
  Field grad = p.gradient(v);
  Field dir = solve_shifted_laplacian(p.precond_V, grad, p.lap_coeff);
  for (auto& x : dir.values) x = -x;
  if (max_displacement > 0.0) {
    const double d = max_abs(dir);
    if (d > 0.0) max_step = std::min(max_step, max_displacement / d);
  }
  const double slope = variational_inner(grad, dir);  // <= 0 by the SPD preconditioner
  if (slope == 0.0) {
    res.accepted = true;
    return res;  // critical point is a fixed point
  }
  double alpha = max_step;
  while (alpha >= 1e-14) {
    Field cand = detail::axpy(v, alpha, dir);
    if (project_nonneg) detail::clamp_nonneg(cand);
    cand.values[cand.size() - 1] = 0.0;
    const double ec = p.energy(cand);
    if (ec <= e0 + 1e-4 * alpha * slope || (alpha < 1e-10 && ec < e0)) {
      res.next = std::move(cand);
      res.accepted = true;
      res.step = alpha;
      res.energy = ec;
      return res;
    }
    alpha *= 0.5;
  }
  return res;  // step rejected, floor reached
}

namespace detail {

inline bool newton_polish(const VariationalProblem& p, Field& v, double tol, int max_it,
                          int& iters_used);

// Nehari-style local search: displacement-capped descent steps re-projected
// onto the fibering maximum, with periodic Newton polish. Used as a rescue
// when the path deformation alone cannot localize the critical point.
inline bool nehari_search(const VariationalProblem& p, Field& w, double tol, int steps,
                          int& iters_used);

// The artifact restricts itself to positive solitons: a Newton limit with a
// substantial negative part is a sign-changing critical point and is rejected.
inline bool essentially_nonnegative(const Field& v) {
  double mn = 0.0;
  for (double x : v.values) mn = std::min(mn, x);
  return mn >= -1e-6 * max_abs(v);
}

// Damped Newton on the strong-form gradient; returns true on success.
inline bool newton_polish(const VariationalProblem& p, Field& v, double tol, int max_it,
                          int& iters_used) {
  Field res = p.gradient(v);
  double rn = gradient_dual_norm(p, res);
  for (int it = 0; it < max_it; ++it) {
    if (rn <= tol) {
      iters_used += it;
      return essentially_nonnegative(v);
    }
    Field jac = p.jacobian_diag(v);
    Field delta = solve_shifted_laplacian(jac, res, p.lap_coeff);
    double lambda = 1.0;
    bool moved = false;
    while (lambda >= 1.0 / 1024.0) {
      Field cand = axpy(v, -lambda, delta);
      cand.values[cand.size() - 1] = 0.0;
      Field cres = p.gradient(cand);
      const double crn = gradient_dual_norm(p, cres);
      if (std::isfinite(crn) && crn < rn) {
        v = std::move(cand);
        res = std::move(cres);
        rn = crn;
        moved = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!moved) {
      iters_used += it;
      return false;
    }
  }
  iters_used += max_it;
  return rn <= tol && essentially_nonnegative(v);
}

}  // namespace detail

//! Needed below by the search; defined after ray_argmax.
inline Field ray_argmax(const VariationalProblem& p, const Field& v);

namespace detail {

inline bool nehari_search(const VariationalProblem& p, Field& w, double tol, int steps,
                          int& iters_used) {
  if (max_abs(w) == 0.0) return false;
  for (int k = 0; k < steps; ++k) {
    ++iters_used;
    DescentStepResult st = descent_step(p, w, true, 1.0, 0.3 * max_abs(w) + 1e-9);
    if (!st.accepted || max_abs(st.next) == 0.0) break;
    w = ray_argmax(p, st.next);
    if ((k + 1) % 8 == 0 || k + 1 == steps) {
      Field trial = w;
      int used = 0;
      const bool ok = newton_polish(p, trial, tol, 80, used);
      iters_used += used;
      if (ok && p.energy(trial) > 1e-14) {
        w = std::move(trial);
        return true;
      }
    }
  }
  return false;
}

}  // namespace detail

namespace detail {

struct RayMax {
  double level;
  double t;
};

// maximum of t -> E(t v) over the escalated ray (coarse scan + golden section)
inline RayMax ray_max_scan(const VariationalProblem& p, const Field& v) {
  auto at = [&](double t) {
    Field c(v.grid);
    for (int i = 0; i < c.size(); ++i) c.values[i] = t * v[i];
    return p.energy(c);
  };
  double T = 2.0;
  int guard = 0;
  while (at(T) >= 0.0 && guard++ < 60) T *= 2.0;
  double best = p.energy(v), bt = 1.0;
  const int samples = 400;
  for (int j = 1; j <= samples; ++j) {
    const double t = T * j / samples;
    const double e = at(t);
    if (e > best) {
      best = e;
      bt = t;
    }
  }
  double a = std::max(0.0, bt - T / samples), b = bt + T / samples;
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = at(x1), f2 = at(x2);
  for (int k = 0; k < 40; ++k) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = at(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = at(x1);
    }
  }
  RayMax out;
  out.t = 0.5 * (a + b);
  out.level = std::max(best, at(out.t));
  if (best >= out.level) out.t = bt;
  return out;
}

}  // namespace detail

//! Max of the energy along the ray through v, escalated until the endpoint
//! energy is negative so the ray is an admissible mountain-pass path. This is
//! the computable surrogate for the min-max level: an upper bound that is
//! tight whenever t -> E(t v) is unimodal.
inline double ray_level(const VariationalProblem& p, const Field& v) {
  return detail::ray_max_scan(p, v).level;
}

//! v rescaled to the maximizer of its fibering map t -> E(t v).
inline Field ray_argmax(const VariationalProblem& p, const Field& v) {
  const double t = detail::ray_max_scan(p, v).t;
  Field out(v.grid);
  for (int i = 0; i < out.size(); ++i) out.values[i] = t * v[i];
  return out;
}

//! Numerical mountain-pass solve of an abstract problem: a discretized path
//! from 0 to a negative-energy endpoint is re-tensioned as the polyline
//! 0 -> w -> e, its maximizer is located and pushed downhill, and the loop
//! ends when the maximizer is a critical point (Newton-polished to tol).
//! Returns (v, trace, iterations, converged, mp_level).
struct MountainPassOutcome {
  Field v;
  std::vector<PathTracePoint> trace;
  int iterations = 0;
  bool converged = false;
  double mp_level = 0.0;
  double grad_norm = 0.0;
};

inline MountainPassOutcome mountain_pass_solve_problem(
    const VariationalProblem& p, int path_points, double tol, int max_iters,
    double seed_amplitude, const std::optional<Field>& warm_start = std::nullopt) {
  MountainPassOutcome out;
  double seed = seed_amplitude;
  for (int restart = 0; restart < 4; ++restart) {
    Field e = initial_endpoint(p, seed);
    const int m = std::max(path_points, 3);
    // discretized path: m+1 vertices from 0 to e; the warm profile, when
    // given, becomes the midpoint of the initial polygon
    std::vector<Field> path;
    path.reserve(m + 1);
    {
      Field mid(p.grid);
      if (warm_start && restart == 0 && warm_start->size() == p.grid->nodes) {
        mid = *warm_start;
        detail::clamp_nonneg(mid);
        mid.values[mid.size() - 1] = 0.0;
      }
      const bool warm_ok = max_abs(mid) > 0.0 && p.energy(mid) > 0.0;
      for (int j = 0; j <= m; ++j) {
        const double s = double(j) / m;
        if (warm_ok)
          path.push_back(detail::path_point(mid, e, s));
        else {
          Field c(p.grid);
          for (int i = 0; i < c.size(); ++i) c.values[i] = s * e[i];
          path.push_back(std::move(c));
        }
      }
    }
    auto vertex_energies = [&]() {
      std::vector<double> en(m + 1);
      for (int j = 0; j <= m; ++j) en[j] = p.energy(path[j]);
      return en;
    };
    std::vector<double> energies = vertex_energies();

    out.trace.clear();
    bool collapsed = false;
    int next_newton_attempt = 10;
    Field best_ridge;  // lowest-gradient ridge point seen, fallback Newton seed
    double best_ridge_gn = 1e300;
    for (int iter = 1; iter <= max_iters; ++iter) {
      ++out.iterations;
      // locate the maximizer vertex; smallest index wins ties
      int jmax = 0;
      for (int j = 1; j <= m; ++j)
        if (energies[j] > energies[jmax]) jmax = j;
      const double emax = energies[jmax];
      out.trace.push_back({out.iterations, emax});
      if (jmax == 0 || jmax == m || emax <= 1e-14) {
        collapsed = true;  // path slid below the mountain ridge
        break;
      }
      Field& wmax = path[jmax];
      Field grad = p.gradient(wmax);
      const double gn = gradient_dual_norm(p, grad);
      if (gn < best_ridge_gn) {
        best_ridge_gn = gn;
        best_ridge = wmax;
        best_ridge_energy = emax;
      }
      if (gn <= tol) {
        out.v = wmax;
        out.converged = true;
        out.grad_norm = gn;
        break;
      }
      // Newton polish once the ridge point looks nearly critical; the seed is
      // first rescaled to its fibering maximum, which collapses amplitude
      // overshoot and lands far closer to the critical point
      if (gn <= 5e-2 * std::max(1.0, std::sqrt(emax)) || iter == next_newton_attempt) {
        if (iter >= next_newton_attempt) next_newton_attempt = 2 * iter;
        Field trial = ray_argmax(p, wmax);
        int used = 0;
        bool ok = detail::newton_polish(p, trial, tol, 80, used);
        if (!ok && iter >= 40) {
          // stubborn landscape: follow the fibering maxima downhill a while
          trial = ray_argmax(p, wmax);
          ok = detail::nehari_search(p, trial, tol, 64, used);
        }
        out.iterations += used;
        // accept only nontrivial limits at or below the current crest: a
        // critical point above the path max cannot be the min-max point
        if (ok && p.energy(trial) > 1e-14 &&
            p.energy(trial) <= emax * (1.0 + 1e-9) + 1e-9) {
          out.v = std::move(trial);
          out.converged = true;
          out.grad_norm = gradient_dual_norm(p, p.gradient(out.v));
          break;
        }
      }
      // push only the maximizer vertex downhill: the path max over vertices
      // cannot increase (min-max monotonicity of the deformation). The move
      // is displacement-capped so the vertex settles onto the ridge instead
      // of being flung into a basin.
      DescentStepResult st =
          descent_step(p, wmax, true, 1.0, 0.3 * max_abs(wmax) + 1e-9);
      if (st.accepted) {
        path[jmax] = std::move(st.next);
        energies[jmax] = st.energy;
      }
      // re-tension: redistribute vertices uniformly along the polygon,
      // accepted only when it does not raise the vertex maximum
      if (iter % 8 == 0) {
        std::vector<double> arc(m + 1, 0.0);
        for (int j = 1; j <= m; ++j) {
          Field d = path[j];
          for (int i = 0; i < d.size(); ++i) d.values[i] -= path[j - 1][i];
          arc[j] = arc[j - 1] + std::sqrt(std::max(0.0, variational_inner(d, d)));
        }
        if (arc[m] > 0.0) {
          std::vector<Field> fresh;
          fresh.reserve(m + 1);
          fresh.push_back(path[0]);
          int seg = 1;
          for (int j = 1; j < m; ++j) {
            const double target = arc[m] * j / m;
            while (seg < m && arc[seg] < target) ++seg;
            const double t0 = arc[seg - 1], t1 = arc[seg];
            const double s = t1 > t0 ? (target - t0) / (t1 - t0) : 0.0;
            Field c(p.grid);
            for (int i = 0; i < c.size(); ++i)
              c.values[i] = (1.0 - s) * path[seg - 1][i] + s * path[seg][i];
            fresh.push_back(std::move(c));
          }
          fresh.push_back(path[m]);
          std::vector<double> fresh_en(m + 1);
          double fresh_max = -1e300;
          for (int j = 0; j <= m; ++j) {
            fresh_en[j] = p.energy(fresh[j]);
            fresh_max = std::max(fresh_max, fresh_en[j]);
          }
          double cur_max = -1e300;
          for (int j = 0; j <= m; ++j) cur_max = std::max(cur_max, energies[j]);
          if (fresh_max <= cur_max * (1.0 + 1e-12) + 1e-12) {
            path = std::move(fresh);
            energies = std::move(fresh_en);
          }
        }
      }
      double vmax = 0.0;
      for (int j = 1; j < m; ++j) vmax = std::max(vmax, max_abs(path[j]));
      if (vmax < 1e-300) {
        collapsed = true;
        break;
      }
    }
    if (collapsed && !out.converged && best_ridge.grid) {
      // the path slid off the ridge; before restarting, run the fibering
      // search from the best ridge point encountered
      Field trial = ray_argmax(p, best_ridge);
      int used = 0;
      bool ok = detail::newton_polish(p, trial, tol, 120, used);
      if (!ok) {
        trial = ray_argmax(p, best_ridge);
        ok = detail::nehari_search(p, trial, tol, 400, used);
      }
      if (ok && p.energy(trial) > 1e-14) {
        out.v = std::move(trial);
        out.converged = true;
        out.grad_norm = gradient_dual_norm(p, p.gradient(out.v));
      }
      out.iterations += used;
    }
    if (out.converged) {
      // level estimate: the final accepted path is the ray through the
      // converged maximizer, re-escalated to a negative-energy endpoint
      out.mp_level = ray_level(p, out.v);
      return out;
    }
    if (!collapsed) return out;  // max_iters exhausted: partial, not converged
    seed *= 4.0;                 // trivial attractor: restart with a larger seed
  }
  throw SolverError("mountain pass: path collapsed onto the trivial attractor "
                    "after repeated restarts with escalating seeds");
}

//! Mountain-pass level of the kappa-free comparison functional:
//! P_infty for the power model, Q_infty for the saturable one.
inline double comparison_level(const ModelSpec& spec, GridPtr grid, double v_infty,
                               int path_points = 33, double tol = 1e-8) {
  Transform tf(spec);
  VariationalProblem p = spec.model == Model::Saturable
                             ? make_q_infty_problem(tf, grid, v_infty)
                             : make_p_infty_problem(spec.q, grid, v_infty);
  MountainPassOutcome mp = mountain_pass_solve_problem(p, path_points, tol, 20000, 1.0);
  if (!mp.converged)
    throw SolverError("comparison functional mountain pass did not converge");
  return mp.mp_level;
}

//! Full solve: adaptive truncation radius, mountain pass on the transformed
//! functional, recovery of u = G^{-1}(v), and the energy report.
inline Solution mountain_pass_solve(const SolverConfig& cfg,
                                    const std::optional<Field>& warm_start = std::nullopt) {
  cfg.validate();
  Transform tf(cfg.model);
  double radius = cfg.radius;
  for (int attempt = 0;; ++attempt) {
    GridPtr grid = make_grid(cfg.model.dim, radius, cfg.grid_nodes);
    Field V = potential_eval(cfg.potential, grid);
    VariationalProblem p = make_transformed_problem(tf, V);
    std::optional<Field> warm;
    if (warm_start && warm_start->grid && warm_start->size() == grid->nodes &&
        warm_start->grid->radius == radius)
      warm = warm_start;
    MountainPassOutcome mp = mountain_pass_solve_problem(
        p, cfg.path_points, cfg.descent_tol, cfg.max_iters, cfg.seed_amplitude, warm);
    if (!mp.converged) {
      Solution s;
      s.model = cfg.model;
      s.potential = cfg.potential;
      s.v = mp.v.grid ? mp.v : Field(grid);
      s.u = recover_u(tf, s.v);
      s.energy.j_value = p.energy(s.v);
      s.energy.grad_norm = mp.grad_norm;
      s.energy.mp_level = mp.mp_level;
      s.iterations = mp.iterations;
      s.converged = false;
      s.path_trace = std::move(mp.trace);
      return s;
    }
    // decay check at 0.9 R; Remark-style exponential decay makes doubling safe
    const int probe = std::min(grid->nodes - 1, int(0.9 * (grid->nodes - 1)));
    const double vmax = max_abs(mp.v);
    if (cfg.adaptive_radius && std::abs(mp.v[probe]) >= 1e-8 * vmax && attempt < 6) {
      radius *= 2.0;
      continue;
    }
    Solution s;
    s.model = cfg.model;
    s.potential = cfg.potential;
    s.v = std::move(mp.v);
    for (auto& x : s.v.values) x = std::max(x, 0.0);  // clear sub-roundoff tail noise
    s.u = recover_u(tf, s.v);
    s.energy.j_value = p.energy(s.v);
    s.energy.i_value = energy_original(tf, s.u, V);
    s.energy.grad_norm = gradient_dual_norm(p, p.gradient(s.v));
    s.energy.mp_level = std::max(mp.mp_level, s.energy.j_value);
    s.iterations = mp.iterations;
    s.converged = s.energy.grad_norm <= cfg.descent_tol && s.energy.j_value > 0.0;
    s.path_trace = std::move(mp.trace);
    if (cfg.compute_comparison_level)
      s.energy.comparison_level =
          comparison_level(cfg.model, grid, cfg.potential.v_infty, cfg.path_points,
                           cfg.descent_tol);
    return s;
  }
}

}  // namespace qls
