#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "qlsoliton/grid.hpp"
#include "qlsoliton/transforms.hpp"

namespace qls {

//! Independent oracle: solves the radial ODE form of the transformed equation,
//!   v'' + (N-1)/r v' = W(v),   W(v) = V_infty G^{-1}(v)/g(G^{-1}(v)) - l(G^{-1}(v))/g(G^{-1}(v)),
//! by bisection on the central amplitude between blow-down (v crosses zero)
//! and bounce-back (v turns upward) behaviors. Constant potential only.
struct ShootingResult {
  Field profile;         // v on the grid, exponential tail matched beyond match_radius
  double amplitude = 0;  // v(0)
  double match_radius = 0;
  bool conclusive = false;
  std::string message;
};

namespace detail {

struct OdeSample {
  double r, v, dv;
};

enum class ShotKind { Cross, Turn, Decay };

template <typename Rhs>
class CashKarpShooter {
 public:
  CashKarpShooter(Rhs rhs, int dim, double rmax) : rhs_(rhs), dim_(dim), rmax_(rmax) {}

  //! Integrates from a series start near r = 0; optionally records samples.
  ShotKind shoot(double A, std::vector<OdeSample>* dense = nullptr) const {
    const double r0 = 1e-7 * rmax_;
    const double W0 = rhs_(A);
    double r = r0;
    double v = A + 0.5 * W0 * r0 * r0 / dim_;
    double dv = W0 * r0 / dim_;
    double h = 1e-4 * rmax_;
    const double atol = 1e-13 * std::abs(A), rtol = 1e-11;
    const double tiny = 1e-10 * std::abs(A);
    if (dense) dense->push_back({r, v, dv});
    int guard = 0;
    while (r < rmax_) {
      if (++guard > 2000000) return ShotKind::Decay;
      h = std::min(h, rmax_ - r);
      double rn, vn, dvn, err;
      step(r, v, dv, h, rn, vn, dvn, err);
      const double tol = atol + rtol * std::max(std::abs(v), std::abs(dv));
      if (err > tol && h > 1e-14 * rmax_) {
        h *= std::max(0.2, 0.9 * std::pow(tol / err, 0.25));
        continue;
      }
      r = rn;
      v = vn;
      dv = dvn;
      if (dense) dense->push_back({r, v, dv});
      if (err > 0.0) h *= std::min(5.0, 0.9 * std::pow(tol / err, 0.2));
      if (v < 0.0) return ShotKind::Cross;
      if (dv > 0.0 && v > tiny && r > 1e-3 * rmax_) return ShotKind::Turn;
      if (v < tiny && std::abs(dv) < tiny) return ShotKind::Decay;
    }
    return ShotKind::Decay;
  }

 private:
  void deriv(double r, double v, double dv, double& f1, double& f2) const {
    f1 = dv;
    f2 = rhs_(v) - (dim_ - 1) * dv / r;
  }

  void step(double r, double v, double dv, double h, double& rn, double& vn, double& dvn,
            double& err) const {
    // Cash-Karp embedded 4(5) pair
    static const double a2 = 0.2, a3 = 0.3, a4 = 0.6, a5 = 1.0, a6 = 0.875;
    static const double b21 = 0.2;
    static const double b31 = 3.0 / 40, b32 = 9.0 / 40;
    static const double b41 = 0.3, b42 = -0.9, b43 = 1.2;
    static const double b51 = -11.0 / 54, b52 = 2.5, b53 = -70.0 / 27, b54 = 35.0 / 27;
    static const double b61 = 1631.0 / 55296, b62 = 175.0 / 512, b63 = 575.0 / 13824,
                        b64 = 44275.0 / 110592, b65 = 253.0 / 4096;
    static const double c1 = 37.0 / 378, c3 = 250.0 / 621, c4 = 125.0 / 594,
                        c6 = 512.0 / 1771;
    static const double d1 = 2825.0 / 27648, d3 = 18575.0 / 48384, d4 = 13525.0 / 55296,
                        d5 = 277.0 / 14336, d6 = 0.25;
    double k1v, k1d, k2v, k2d, k3v, k3d, k4v, k4d, k5v, k5d, k6v, k6d;
    deriv(r, v, dv, k1v, k1d);
    deriv(r + a2 * h, v + h * b21 * k1v, dv + h * b21 * k1d, k2v, k2d);
    deriv(r + a3 * h, v + h * (b31 * k1v + b32 * k2v), dv + h * (b31 * k1d + b32 * k2d), k3v,
          k3d);
    deriv(r + a4 * h, v + h * (b41 * k1v + b42 * k2v + b43 * k3v),
          dv + h * (b41 * k1d + b42 * k2d + b43 * k3d), k4v, k4d);
    deriv(r + a5 * h, v + h * (b51 * k1v + b52 * k2v + b53 * k3v + b54 * k4v),
          dv + h * (b51 * k1d + b52 * k2d + b53 * k3d + b54 * k4d), k5v, k5d);
    deriv(r + a6 * h, v + h * (b61 * k1v + b62 * k2v + b63 * k3v + b64 * k4v + b65 * k5v),
          dv + h * (b61 * k1d + b62 * k2d + b63 * k3d + b64 * k4d + b65 * k5d), k6v, k6d);
    rn = r + h;
    vn = v + h * (c1 * k1v + c3 * k3v + c4 * k4v + c6 * k6v);
    dvn = dv + h * (c1 * k1d + c3 * k3d + c4 * k4d + c6 * k6d);
    const double ve = v + h * (d1 * k1v + d3 * k3v + d4 * k4v + d5 * k5v + d6 * k6v);
    const double de = dv + h * (d1 * k1d + d3 * k3d + d4 * k4d + d5 * k5d + d6 * k6d);
    err = std::max(std::abs(vn - ve), std::abs(dvn - de));
  }

  Rhs rhs_;
  int dim_;
  double rmax_;
};

}  // namespace detail

inline ShootingResult shooting_oracle(const Transform& tf, double v_infty, GridPtr grid) {
  ShootingResult out;
  auto rhs = [&tf, v_infty](double v) {
    const double u = tf.G_inverse(v);
    const double g = tf.g(u);
    return (v_infty * u - tf.nonlinearity(u)) / g;
  };
  detail::CashKarpShooter<decltype(rhs)> shooter(rhs, grid->dim, grid->radius);

  // crossover amplitude: smallest a with W(a) <= 0; below it every shot turns
  double hi_w = 1.0;
  int guard = 0;
  while (rhs(hi_w) > 0.0 && guard++ < 200) hi_w *= 2.0;
  if (guard >= 200) {
    out.message = "no sign change of the reaction term; oracle inconclusive";
    return out;
  }
  double lo_w = 1e-8;
  for (int k = 0; k < 120; ++k) {
    const double mid = 0.5 * (lo_w + hi_w);
    (rhs(mid) > 0.0 ? lo_w : hi_w) = mid;
  }
  const double a_cross = 0.5 * (lo_w + hi_w);

  double a_lo = 0.9 * a_cross;  // guaranteed turn
  double a_hi = 2.0 * a_cross;
  bool bracketed = false;
  for (int k = 0; k < 60; ++k) {
    if (shooter.shoot(a_hi) == detail::ShotKind::Cross) {
      bracketed = true;
      break;
    }
    a_hi *= 2.0;
  }
  if (!bracketed) {
    out.message = "no overshoot found in amplitude bracket; oracle inconclusive";
    return out;
  }
  for (int k = 0; k < 200 && (a_hi - a_lo) > 1e-15 * a_hi; ++k) {
    const double mid = 0.5 * (a_lo + a_hi);
    (shooter.shoot(mid) == detail::ShotKind::Cross ? a_hi : a_lo) = mid;
  }
  out.amplitude = 0.5 * (a_lo + a_hi);

  std::vector<detail::OdeSample> dense;
  shooter.shoot(out.amplitude, &dense);

  // keep the trajectory while it is clean, then match an exponential tail
  const double mu = std::sqrt(v_infty);
  const double halfpow = 0.5 * (grid->dim - 1);
  double r_match = dense.back().r;
  double v_match = std::max(dense.back().v, 0.0);
  for (size_t k = 1; k < dense.size(); ++k) {
    if (dense[k].v <= 1e-9 * out.amplitude || dense[k].v > dense[k - 1].v) {
      r_match = dense[k - 1].r;
      v_match = dense[k - 1].v;
      dense.resize(k);
      break;
    }
  }
  out.match_radius = r_match;

  Field prof(grid);
  size_t k = 0;
  for (int i = 0; i < grid->nodes; ++i) {
    const double r = grid->r[i];
    if (r <= r_match) {
      while (k + 1 < dense.size() && dense[k + 1].r < r) ++k;
      const auto& s0 = dense[k];
      const auto& s1 = dense[std::min(k + 1, dense.size() - 1)];
      if (s1.r > s0.r) {
        const double t = (r - s0.r) / (s1.r - s0.r);
        const double dr = s1.r - s0.r;
        const double h00 = (1 + 2 * t) * (1 - t) * (1 - t), h10 = t * (1 - t) * (1 - t);
        const double h01 = t * t * (3 - 2 * t), h11 = t * t * (t - 1);
        prof.values[i] = h00 * s0.v + h10 * dr * s0.dv + h01 * s1.v + h11 * dr * s1.dv;
      } else {
        prof.values[i] = s0.v;
      }
    } else {
      prof.values[i] =
          v_match * std::pow(r_match / r, halfpow) * std::exp(-mu * (r - r_match));
    }
  }
  prof.values[0] = out.amplitude;
  prof.values[grid->nodes - 1] = 0.0;
  out.profile = std::move(prof);
  out.conclusive = true;
  return out;
}

}  // namespace qls
