#pragma once

#include <cmath>
#include <string>

#include "qlsoliton/errors.hpp"

namespace qls {

enum class Model {
  PowerQ,     // power nonlinearity |u|^{q-2} u
  Saturable,  // saturable nonlinearity [1 - 1/(1+u^2)^3] u, modified beyond u = 1
};

//! Which equation is being solved, and its parameters.
//!
//! kappa is the strength of the quasilinear term (kappa/2)[lap u^2]u.
//! The admissible windows are
//!   PowerQ:    kappa > 0,  2 < q < 2N/(N-2)
//!   Saturable: 0 < kappa < 1/3,  2 < q < min(14/5, 2N/(N-2))
//! kappa = 0 is accepted only with the explicit semilinear_reference flag;
//! it routes the whole pipeline through g == 1 and serves as an oracle mode.
struct ModelSpec {
  Model model = Model::PowerQ;
  double kappa = 0.0;
  double q = 3.0;
  int dim = 3;
  bool semilinear_reference = false;

  double critical_exponent() const { return 2.0 * dim / (dim - 2.0); }

  bool is_semilinear() const { return semilinear_reference; }

  static ModelSpec power(double kappa, double q, int dim = 3) {
    ModelSpec s;
    s.model = Model::PowerQ;
    s.kappa = kappa;
    s.q = q;
    s.dim = dim;
    s.validate();
    return s;
  }

  static ModelSpec saturable(double kappa, double q, int dim = 3) {
    ModelSpec s;
    s.model = Model::Saturable;
    s.kappa = kappa;
    s.q = q;
    s.dim = dim;
    s.validate();
    return s;
  }

  //! kappa = 0 reference mode: g == 1, the plain semilinear equation.
  static ModelSpec semilinear(double q, int dim = 3) {
    ModelSpec s;
    s.model = Model::PowerQ;
    s.kappa = 0.0;
    s.q = q;
    s.dim = dim;
    s.semilinear_reference = true;
    s.validate();
    return s;
  }

  void validate() const {
    if (dim < 3) throw ConfigError("model: dim must be >= 3, got " + std::to_string(dim));
    if (!(kappa >= 0.0) || !std::isfinite(kappa))
      throw ConfigError("model: kappa must be finite and nonnegative");
    if (kappa == 0.0 && !semilinear_reference)
      throw ConfigError(
          "model: kappa = 0 is only allowed in the explicit semilinear reference mode");
    if (semilinear_reference && kappa != 0.0)
      throw ConfigError("model: semilinear reference mode requires kappa = 0");
    if (semilinear_reference && model == Model::Saturable)
      throw ConfigError("model: semilinear reference mode applies to the power model only");
    const double two_star = critical_exponent();
    if (model == Model::PowerQ) {
      if (!(q > 2.0 && q < two_star))
        throw ConfigError("model: power model requires 2 < q < 2N/(N-2) = " +
                          std::to_string(two_star) + ", got q = " + std::to_string(q));
    } else {
      const double qmax = std::min(14.0 / 5.0, two_star);
      if (!(q > 2.0 && q < qmax))
        throw ConfigError("model: saturable model requires 2 < q < min(14/5, 2N/(N-2)) = " +
                          std::to_string(qmax) + ", got q = " + std::to_string(q));
      if (!(kappa > 0.0 && kappa < 1.0 / 3.0))
        throw ConfigError("model: saturable model requires 0 < kappa < 1/3, got kappa = " +
                          std::to_string(kappa));
    }
  }
};

inline const char* model_name(Model m) {
  return m == Model::PowerQ ? "power" : "saturable";
}

}  // namespace qls
