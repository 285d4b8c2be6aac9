#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "qlsoliton/shooting.hpp"
#include "qlsoliton/solver.hpp"

using namespace qls;

namespace {

SolverConfig desk_config(ModelSpec spec, int n = 1001, double R = 20.0) {
  SolverConfig cfg;
  cfg.model = spec;
  cfg.potential = PotentialSpec::constant(1.0);
  cfg.grid_nodes = n;
  cfg.radius = R;
  cfg.adaptive_radius = false;
  cfg.compute_comparison_level = false;
  return cfg;
}

double rel_l2_distance(const Field& a, const Field& b) {
  double num = 0.0, den = 0.0;
  for (int i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    num += a.grid->quad_w[i] * d * d;
    den += a.grid->quad_w[i] * b[i] * b[i];
  }
  return std::sqrt(num / den);
}

}  // namespace

TEST_CASE("initial endpoint reaches negative energy") {
  auto g = make_grid(3, 15.0, 601);
  Field V(g, 1.0);
  for (auto spec : {ModelSpec::power(0.05, 3.0), ModelSpec::saturable(0.1, 2.5),
                    ModelSpec::semilinear(3.0)}) {
    Transform tf(spec);
    auto p = make_transformed_problem(tf, V);
    Field e = initial_endpoint(p, 1.0);
    INFO("model=" << model_name(spec.model));
    CHECK(p.energy(e) < 0.0);
    CHECK(max_abs(e) > 0.0);
    // scan oracle: the doubling escalation stays within a factor 2 of the
    // smallest bump amplitude with negative energy
    Field phi = endpoint_bump(g);
    double t_first = 0.0;
    for (double t = 0.125; t < 1e9; t *= 1.02) {
      Field c(g);
      for (int i = 0; i < c.size(); ++i) c.values[i] = t * phi[i];
      if (p.energy(c) < 0.0) {
        t_first = t;
        break;
      }
    }
    REQUIRE(t_first > 0.0);
    CHECK(max_abs(e) <= 2.0 * t_first * max_abs(phi) * 1.03);
  }
}

TEST_CASE("descent step: critical fixed point and monotone energy") {
  auto g = make_grid(3, 10.0, 401);
  Field V(g, 1.0);
  Transform tf(ModelSpec::power(0.05, 3.0));
  auto p = make_transformed_problem(tf, V);

  Field zero(g);
  auto st0 = descent_step(p, zero);
  CHECK(st0.accepted);
  CHECK(max_abs(st0.next) == 0.0);

  std::mt19937 rng(19);
  std::uniform_real_distribution<double> dist(0.0, 1.5);
  for (int trial = 0; trial < 8; ++trial) {
    Field v(g);
    for (int i = 0; i + 1 < v.size(); ++i)
      v.values[i] = dist(rng) * std::exp(-0.3 * g->r[i]);
    const double e0 = p.energy(v);
    auto st = descent_step(p, v);
    CHECK(st.accepted);
    CHECK(st.energy <= e0);
    if (max_abs(p.gradient(v)) > 1e-8) CHECK(st.energy < e0);
  }
}

TEST_CASE("mountain pass finds the nontrivial critical point") {
  for (auto spec : {ModelSpec::semilinear(3.0), ModelSpec::power(0.05, 3.0),
                    ModelSpec::saturable(0.1, 2.5)}) {
    SolverConfig cfg = desk_config(spec);
    Solution s = mountain_pass_solve(cfg);
    INFO("model=" << model_name(spec.model) << " kappa=" << spec.kappa);
    REQUIRE(s.converged);
    CHECK(s.energy.grad_norm <= cfg.descent_tol);
    CHECK(s.energy.j_value > 0.0);
    CHECK(s.energy.mp_level >= s.energy.j_value - 1e-9);
    CHECK(max_abs(s.v) > 0.1);  // nontrivial, well above any geometry radius

    // u = G^{-1}(v) nodewise with a G round-trip within 1e-10
    Transform tf(spec);
    for (int i = 0; i < s.v.size(); i += 97) {
      CHECK(std::abs(tf.G(s.u[i]) - s.v[i]) <= 1e-10 * std::max(1.0, std::abs(s.v[i])));
      CHECK(s.u[i] >= s.v[i] - 1e-12);
      CHECK(s.u[i] <= tf.bracket_factor() * s.v[i] + 1e-12);
    }

    // path maxima are non-increasing across outer iterations
    for (size_t k = 1; k < s.path_trace.size(); ++k) {
      CHECK(s.path_trace[k].path_max_energy <=
            s.path_trace[k - 1].path_max_energy * (1.0 + 1e-9) + 1e-9);
    }

    // nodal max of the gradient vanishes at the converged solution
    Field V = potential_eval(cfg.potential, s.v.grid);
    CHECK(max_abs(gradient(tf, s.v, V)) <= 1e-6);
  }
}

TEST_CASE("energy cannot be lowered from the converged solution") {
  SolverConfig cfg = desk_config(ModelSpec::power(0.05, 3.0), 601, 16.0);
  Solution s = mountain_pass_solve(cfg);
  REQUIRE(s.converged);
  Transform tf(cfg.model);
  Field V = potential_eval(cfg.potential, s.v.grid);
  auto p = make_transformed_problem(tf, V);
  auto st = descent_step(p, s.v);
  CHECK(st.accepted);
  CHECK(rel_l2_distance(st.next, s.v) <= 1e-6);
}

TEST_CASE("partial solution is flagged when iterations run out") {
  SolverConfig cfg = desk_config(ModelSpec::power(0.05, 3.0), 601, 16.0);
  cfg.max_iters = 2;
  Solution s = mountain_pass_solve(cfg);
  CHECK_FALSE(s.converged);
  CHECK(s.iterations >= 2);
}

TEST_CASE("warm start converges to the same solution") {
  SolverConfig cfg = desk_config(ModelSpec::power(0.04, 3.0), 801, 18.0);
  Solution cold = mountain_pass_solve(cfg);
  REQUIRE(cold.converged);
  SolverConfig cfg2 = desk_config(ModelSpec::power(0.05, 3.0), 801, 18.0);
  Solution warm = mountain_pass_solve(cfg2, cold.v);
  Solution cold2 = mountain_pass_solve(cfg2);
  REQUIRE(warm.converged);
  REQUIRE(cold2.converged);
  CHECK(rel_l2_distance(warm.v, cold2.v) <= 1e-8);
}

TEST_CASE("dilation maximum sits at the converged solution (V == V_infty)") {
  SolverConfig cfg = desk_config(ModelSpec::power(0.05, 3.0), 1001, 20.0);
  Solution s = mountain_pass_solve(cfg);
  REQUIRE(s.converged);
  Transform tf(cfg.model);
  const double e1 = dilation_energy(tf, s.v, 1.0, 1.0);
  CHECK(e1 == Catch::Approx(s.energy.j_value).epsilon(1e-10));
  // derivative in t vanishes at t = 1
  const double ep = dilation_energy(tf, s.v, 1.0, 1.0 + 1e-5);
  const double em = dilation_energy(tf, s.v, 1.0, 1.0 - 1e-5);
  CHECK(std::abs((ep - em) / 2e-5) <= 1e-3 * std::abs(e1));
  // increasing before, decreasing after
  const double d05 = dilation_energy(tf, s.v, 1.0, 0.5);
  const double d09 = dilation_energy(tf, s.v, 1.0, 0.9);
  const double d11 = dilation_energy(tf, s.v, 1.0, 1.1);
  const double d20 = dilation_energy(tf, s.v, 1.0, 2.0);
  CHECK(d05 < d09);
  CHECK(d09 < e1);
  CHECK(e1 > d11);
  CHECK(d11 > d20);
}

TEST_CASE("comparison level dominates the mountain-pass level") {
  SolverConfig cfg = desk_config(ModelSpec::power(0.05, 3.0), 801, 18.0);
  cfg.compute_comparison_level = true;
  Solution s = mountain_pass_solve(cfg);
  REQUIRE(s.converged);
  REQUIRE(s.energy.comparison_level.has_value());
  CHECK(*s.energy.comparison_level >= s.energy.mp_level);  // c_kappa <= d_infty
}

TEST_CASE("shooting oracle: bracket, positivity, decay, cross-validation") {
  auto spec = ModelSpec::power(1e-8, 3.0);
  Transform tf(spec);
  auto g = make_grid(3, 20.0, 1001);
  ShootingResult sh = shooting_oracle(tf, 1.0, g);
  REQUIRE(sh.conclusive);
  CHECK(sh.amplitude > 0.0);
  // positive and decreasing profile
  bool positive = true, decreasing = true;
  for (int i = 0; i + 1 < g->nodes; ++i) {
    if (sh.profile[i] < 0.0) positive = false;
    if (sh.profile[i + 1] > sh.profile[i] + 1e-12) decreasing = false;
  }
  CHECK(positive);
  CHECK(decreasing);
  // exponential tail with rate about sqrt(V_infty) = 1
  std::vector<double> xs, ys;
  for (int i = 0; i < g->nodes; ++i) {
    const double r = g->r[i];
    if (r >= 8.0 && r <= 14.0) {
      xs.push_back(r);
      ys.push_back(std::log(sh.profile[i]));
    }
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double m = static_cast<double>(xs.size());
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  CHECK(-slope == Catch::Approx(1.0).margin(0.15));
  // plugged into the gradient, the oracle profile has O(h^2)-level residual
  Field V(g, 1.0);
  Field grad = gradient(tf, sh.profile, V);
  double mx = 0.0;
  for (int i = 1; i + 1 < g->nodes; ++i) mx = std::max(mx, std::abs(grad[i]));
  const double h = g->spacing;
  CHECK(mx <= 100.0 * h * h * 30.0 + 1e-6);
}

TEST_CASE("mountain pass agrees with the shooting oracle") {
  SolverConfig cfg = desk_config(ModelSpec::power(1e-8, 3.0), 1001, 20.0);
  Solution s = mountain_pass_solve(cfg);
  REQUIRE(s.converged);
  Transform tf(cfg.model);
  ShootingResult sh = shooting_oracle(tf, 1.0, s.v.grid);
  REQUIRE(sh.conclusive);
  CHECK(rel_l2_distance(s.v, sh.profile) <= 1e-3);
}
