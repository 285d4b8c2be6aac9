#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include "qlsoliton/errors.hpp"
#include "qlsoliton/model.hpp"

namespace qls {

namespace detail {

// asin(x)/x, stable for small x.
inline double asinc(double x) {
  const double ax = std::abs(x);
  if (ax < 1e-4) {
    const double x2 = x * x;
    return 1.0 + x2 / 6.0 + 3.0 * x2 * x2 / 40.0;
  }
  return std::asin(x) / x;
}

}  // namespace detail

//! Truncated diffusion coefficient g, its primitive G = int_0^u g, the inverse
//! G^{-1}, and the driving nonlinearity of the transformed equation.
//!
//! Both model cases share the inner piece g(t) = sqrt(1 - kappa t^2); beyond
//! the breakpoint t* the coefficient continues C^1 with
//!   power:     g(t) = 1/(3 sqrt(2 kappa) t) + sqrt(1/6),      t* = sqrt(1/(3 kappa))
//!   saturable: g(t) = kappa/(t sqrt(1-kappa)) + (1-2 kappa)/sqrt(1-kappa),  t* = 1
//! g is extended evenly to t < 0 and G oddly, exactly as in the continuous
//! definitions. The semilinear reference mode has g == 1 and G == id.
class Transform {
 public:
  explicit Transform(const ModelSpec& spec) : spec_(spec) {
    spec_.validate();
    if (spec_.is_semilinear()) {
      breakpoint_ = std::numeric_limits<double>::infinity();
      g_infimum_ = 1.0;
      G_breakpoint_ = std::numeric_limits<double>::infinity();
      return;
    }
    const double k = spec_.kappa;
    if (spec_.model == Model::PowerQ) {
      breakpoint_ = std::sqrt(1.0 / (3.0 * k));
      g_infimum_ = std::sqrt(1.0 / 6.0);
    } else {
      breakpoint_ = 1.0;
      g_infimum_ = (1.0 - 2.0 * k) / std::sqrt(1.0 - k);
    }
    G_breakpoint_ = sqrt_piece_primitive(breakpoint_);
  }

  const ModelSpec& spec() const { return spec_; }

  //! Breakpoint t* where the sqrt piece hands over to the outer piece.
  double breakpoint() const { return breakpoint_; }

  //! Infimum of g over the real line; g maps into (g_infimum, 1].
  double g_infimum() const { return g_infimum_; }

  //! Upper slope of G^{-1}: t <= G^{-1}(t) <= bracket_factor * t for t >= 0.
  double bracket_factor() const { return 1.0 / g_infimum_; }

  double g(double t) const {
    if (spec_.is_semilinear()) return 1.0;
    const double a = std::abs(t);
    const double k = spec_.kappa;
    if (a < breakpoint_) return std::sqrt(1.0 - k * a * a);
    if (spec_.model == Model::PowerQ)
      return 1.0 / (3.0 * std::sqrt(2.0 * k) * a) + std::sqrt(1.0 / 6.0);
    return k / (a * std::sqrt(1.0 - k)) + (1.0 - 2.0 * k) / std::sqrt(1.0 - k);
  }

  //! dg/dt; odd, zero at t = 0, continuous across t*.
  double g_derivative(double t) const {
    if (spec_.is_semilinear() || t == 0.0) return 0.0;
    const double s = t > 0.0 ? 1.0 : -1.0;
    const double a = std::abs(t);
    const double k = spec_.kappa;
    if (a < breakpoint_) return s * (-k * a / std::sqrt(1.0 - k * a * a));
    if (spec_.model == Model::PowerQ) return s * (-1.0 / (3.0 * std::sqrt(2.0 * k) * a * a));
    return s * (-k / (a * a * std::sqrt(1.0 - k)));
  }

  //! G(u) = int_0^u g(s) ds, closed form per piece, odd in u, strictly increasing.
  double G(double u) const {
    if (spec_.is_semilinear()) return u;
    const double s = u >= 0.0 ? 1.0 : -1.0;
    const double a = std::abs(u);
    if (a <= breakpoint_) return s * sqrt_piece_primitive(a);
    const double k = spec_.kappa;
    double tail;
    if (spec_.model == Model::PowerQ)
      tail = std::log(a / breakpoint_) / (3.0 * std::sqrt(2.0 * k)) +
             std::sqrt(1.0 / 6.0) * (a - breakpoint_);
    else
      tail = k * std::log(a) / std::sqrt(1.0 - k) +
             (1.0 - 2.0 * k) * (a - 1.0) / std::sqrt(1.0 - k);
    return s * (G_breakpoint_ + tail);
  }

  //! Inverse of G by bracketed Newton; |G(result) - t| <= 1e-12 max(1, |t|).
  //! The bracket [t, t/g_infimum] is guaranteed by the sandwich bounds.
  double G_inverse(double t) const {
    if (spec_.is_semilinear() || t == 0.0) return t;
    const double s = t >= 0.0 ? 1.0 : -1.0;
    const double a = std::abs(t);
    double lo = a;
    double hi = a * bracket_factor();
    double u = 0.5 * (lo + hi);
    const double tol = 1e-13 * std::max(1.0, a);
    for (int it = 0; it < 200; ++it) {
      const double r = G(u) - a;
      if (std::abs(r) <= tol) return s * u;
      if (r > 0.0)
        hi = u;
      else
        lo = u;
      double step = r / g(u);
      double next = u - step;
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);  // bisection fallback
      u = next;
    }
    if (std::abs(G(u) - a) <= 1e-12 * std::max(1.0, a)) return s * u;
    throw NumericsError("G_inverse: Newton did not converge at t = " + std::to_string(t));
  }

  //! Driving nonlinearity of the transformed problem.
  //!   power / semilinear:  l(t) = |t|^{q-2} t
  //!   saturable:           f(t) = 0 (t<=0), [1 - 1/(1+t^2)^3] t (0<=t<=1), (7/8) t^{q-1} (t>=1)
  double nonlinearity(double t) const {
    const double q = spec_.q;
    if (spec_.model == Model::PowerQ) {
      if (t == 0.0) return 0.0;
      return std::pow(std::abs(t), q - 2.0) * t;
    }
    if (t <= 0.0) return 0.0;
    if (t <= 1.0) {
      const double w = 1.0 + t * t;
      return (1.0 - 1.0 / (w * w * w)) * t;
    }
    return 0.875 * std::pow(t, q - 1.0);
  }

  //! Primitive F(t) = int_0^t f; exact closed form per piece.
  double nonlinearity_primitive(double t) const {
    const double q = spec_.q;
    if (spec_.model == Model::PowerQ) return std::pow(std::abs(t), q) / q;
    if (t <= 0.0) return 0.0;
    if (t <= 1.0) {
      const double w = 1.0 + t * t;
      return 0.5 * t * t + 0.25 / (w * w) - 0.25;
    }
    // F(1) = 5/16, then (7/8) t^{q-1} integrates to (7/(8q)) (t^q - 1)
    return 5.0 / 16.0 + 0.875 / q * (std::pow(t, q) - 1.0);
  }

  //! df/dt, piecewise; the saturable case has a kink at t = 1.
  double nonlinearity_derivative(double t) const {
    const double q = spec_.q;
    if (spec_.model == Model::PowerQ) {
      if (t == 0.0) return 0.0;
      return (q - 1.0) * std::pow(std::abs(t), q - 2.0);
    }
    if (t <= 0.0) return 0.0;
    if (t <= 1.0) {
      const double w = 1.0 + t * t;
      const double w3 = w * w * w;
      return 1.0 - 1.0 / w3 + 6.0 * t * t / (w3 * w);
    }
    return 0.875 * (q - 1.0) * std::pow(t, q - 2.0);
  }

 private:
  // int_0^c sqrt(1 - kappa s^2) ds for 0 <= c <= t*.
  double sqrt_piece_primitive(double c) const {
    const double k = spec_.kappa;
    const double sk = std::sqrt(k);
    const double x = std::min(sk * c, 1.0);
    return 0.5 * c * std::sqrt(std::max(1.0 - k * c * c, 0.0)) + 0.5 * c * detail::asinc(x);
  }

  ModelSpec spec_;
  double breakpoint_ = 0.0;
  double g_infimum_ = 1.0;
  double G_breakpoint_ = 0.0;
};

}  // namespace qls
