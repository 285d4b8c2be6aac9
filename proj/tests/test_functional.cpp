#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "qlsoliton/functional.hpp"

using namespace qls;

namespace {

// random nodal field vanishing at R
Field rough_field(GridPtr g, std::mt19937& rng, double amp) {
  std::uniform_real_distribution<double> dist(-amp, amp);
  Field v(g);
  for (int i = 0; i + 1 < v.size(); ++i) v.values[i] = dist(rng);
  return v;
}

// smooth random bump superposition vanishing at R
Field smooth_field(GridPtr g, std::mt19937& rng, double amp) {
  std::uniform_real_distribution<double> c(0.0, 0.4 * g->radius);
  std::uniform_real_distribution<double> w(0.5, 2.0);
  std::uniform_real_distribution<double> a(-amp, amp);
  Field v(g);
  for (int k = 0; k < 3; ++k) {
    const double ck = c(rng), wk = w(rng), ak = a(rng);
    for (int i = 0; i < v.size(); ++i) {
      const double x = (g->r[i] - ck) / wk;
      v.values[i] += ak * std::exp(-x * x);
    }
  }
  const double R = g->radius;
  for (int i = 0; i < v.size(); ++i) {
    const double cut = 1.0 - std::exp(-(g->r[i] - R) * (g->r[i] - R) / 4.0);
    v.values[i] *= cut;
  }
  v.values[v.size() - 1] = 0.0;
  return v;
}

double fd_directional(const std::function<double(const Field&)>& E, const Field& v,
                      const Field& psi, double eps) {
  Field p = v, m = v;
  for (int i = 0; i < v.size(); ++i) {
    p.values[i] += eps * psi[i];
    m.values[i] -= eps * psi[i];
  }
  return (E(p) - E(m)) / (2.0 * eps);
}

}  // namespace

TEST_CASE("energies vanish on the zero field") {
  auto g = make_grid(3, 10.0, 201);
  Field zero(g);
  Field V(g, 1.0);
  Transform tp(ModelSpec::power(0.05, 3.0));
  Transform ts(ModelSpec::saturable(0.1, 2.5));
  CHECK(energy(tp, zero, V) == 0.0);
  CHECK(energy(ts, zero, V) == 0.0);
  CHECK(energy_p_infty(zero, 1.0, 3.0) == 0.0);
  CHECK(energy_q_infty(ts, zero, 1.0) == 0.0);
  CHECK(energy_j_infty(tp, zero, 1.0) == 0.0);
  CHECK(max_abs(gradient(tp, zero, V)) == 0.0);
  CHECK(max_abs(gradient(ts, zero, V)) == 0.0);
}

TEST_CASE("analytic gradient matches the finite-difference oracle") {
  auto g = make_grid(3, 10.0, 501);
  Field V(g, 1.0);
  std::mt19937 rng(11);
  for (auto spec : {ModelSpec::power(0.05, 3.0), ModelSpec::saturable(0.1, 2.5)}) {
    Transform tf(spec);
    auto E = [&](const Field& x) { return energy(tf, x, V); };
    for (int trial = 0; trial < 6; ++trial) {
      Field v = rough_field(g, rng, 2.0);
      Field psi = rough_field(g, rng, 1.0);
      Field grad = gradient(tf, v, V);
      const double inner = variational_inner(grad, psi);
      for (double eps : {1e-4, 1e-5}) {
        const double fd = fd_directional(E, v, psi, eps);
        const double scale = std::max({std::abs(fd), std::abs(inner), 1e-8});
        INFO("model=" << model_name(spec.model) << " trial=" << trial << " eps=" << eps);
        CHECK(std::abs(fd - inner) / scale <= 1e-5);
      }
    }
  }
}

TEST_CASE("comparison-functional gradients match finite differences") {
  auto g = make_grid(3, 10.0, 301);
  std::mt19937 rng(13);
  Transform ts(ModelSpec::saturable(0.1, 2.5));
  auto pinf = make_p_infty_problem(3.0, g, 1.0);
  auto qinf = make_q_infty_problem(ts, g, 1.0);
  for (const auto& p : {pinf, qinf}) {
    for (int trial = 0; trial < 4; ++trial) {
      Field v = rough_field(g, rng, 1.5);
      Field psi = rough_field(g, rng, 1.0);
      const double inner = variational_inner(p.gradient(v), psi);
      const double fd = fd_directional(p.energy, v, psi, 1e-5);
      CHECK(std::abs(fd - inner) / std::max(std::abs(fd), 1e-8) <= 1e-5);
    }
  }
}

TEST_CASE("vanishing kappa reproduces the semilinear energy") {
  auto g = make_grid(3, 10.0, 401);
  Field V(g, 1.0);
  std::mt19937 rng(5);
  Transform tiny(ModelSpec::power(1e-8, 3.0));
  Transform semi(ModelSpec::semilinear(3.0));
  for (int trial = 0; trial < 5; ++trial) {
    Field v = smooth_field(g, rng, 1.5);
    const double a = energy(tiny, v, V);
    const double b = energy(semi, v, V);
    CHECK(a == Catch::Approx(b).epsilon(1e-6));
  }
}

TEST_CASE("J is dominated by P_infty and Jt by Q_infty (V == V_infty)") {
  auto g = make_grid(3, 10.0, 401);
  Field V(g, 1.0);
  std::mt19937 rng(17);
  Transform tp(ModelSpec::power(0.08, 3.0));
  Transform ts(ModelSpec::saturable(0.15, 2.5));
  for (int trial = 0; trial < 20; ++trial) {
    Field v = smooth_field(g, rng, 2.0);
    CHECK(energy(tp, v, V) <= energy_p_infty(v, 1.0, 3.0) + 1e-10);
    CHECK(energy(ts, v, V) <= energy_q_infty(ts, v, 1.0) + 1e-10);
  }
}

TEST_CASE("raising the potential to V_infty never decreases the energy") {
  auto g = make_grid(3, 30.0, 601);
  auto well = PotentialSpec::gaussian_well(1.0, 0.5, 1.0);
  Field V = potential_eval(well, g);
  std::mt19937 rng(23);
  Transform tp(ModelSpec::power(0.08, 3.0));
  for (int trial = 0; trial < 10; ++trial) {
    Field v = smooth_field(g, rng, 2.0);
    CHECK(energy(tp, v, V) <= energy_j_infty(tp, v, 1.0) + 1e-10);
  }
}

TEST_CASE("original-variable energy agrees with the transformed one at O(h^2)") {
  Transform tf(ModelSpec::power(0.05, 3.0));
  auto gap_for = [&](int n) {
    auto g = make_grid(3, 10.0, n);
    Field V(g, 1.0);
    std::mt19937 r2(31);
    Field v = smooth_field(g, r2, 2.0);
    Field u(g);
    for (int i = 0; i < n; ++i) u.values[i] = tf.G_inverse(v[i]);
    return std::abs(energy_original(tf, u, V) - energy(tf, v, V));
  };
  const double g1 = gap_for(201), g2 = gap_for(401);
  CHECK(g1 / g2 >= 3.0);  // roughly O(h^2)
}

TEST_CASE("dilation energy: identity at t = 1, domain error, scaling oracle") {
  auto g = make_grid(3, 12.0, 601);
  std::mt19937 rng(37);
  Transform tf(ModelSpec::power(0.05, 3.0));
  Field v = smooth_field(g, rng, 1.5);
  CHECK(dilation_energy(tf, v, 1.0, 1.0) ==
        Catch::Approx(energy_j_infty(tf, v, 1.0)).margin(1e-12));
  CHECK_THROWS_AS(dilation_energy(tf, v, 1.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(dilation_energy(tf, v, 1.0, -2.0), std::domain_error);

  // oracle: physically rescale the profile onto a wider grid and re-evaluate
  for (double t : {0.5, 1.5}) {
    auto g2 = make_grid(3, g->radius * 2.0, 2401);
    Field v2(g2);
    for (int i = 0; i < v2.size(); ++i) {
      const double rr = g2->r[i] / t;  // v_t(x) = v(x/t)
      if (rr >= g->radius) continue;
      const int j = std::min(int(rr / g->spacing), g->nodes - 2);
      const double s = rr / g->spacing - j;
      v2.values[i] = (1.0 - s) * v[j] + s * v[j + 1];
    }
    const double direct = energy_j_infty(tf, v2, 1.0);
    const double scaled = dilation_energy(tf, v, 1.0, t);
    CHECK(scaled == Catch::Approx(direct).epsilon(2e-3));
  }
}

TEST_CASE("mountain-pass geometry: small spheres have positive energy") {
  auto g = make_grid(3, 10.0, 401);
  Field V(g, 1.0);
  std::mt19937 rng(41);
  for (auto spec : {ModelSpec::power(0.05, 3.0), ModelSpec::saturable(0.1, 2.5)}) {
    Transform tf(spec);
    const double rho0 = 0.05;
    double a0 = 1e300;
    for (int trial = 0; trial < 40; ++trial) {
      Field v = smooth_field(g, rng, 1.0);
      const double nrm = h1_norm(v, V);
      if (nrm == 0.0) continue;
      for (auto& x : v.values) x *= rho0 / nrm;
      a0 = std::min(a0, energy(tf, v, V));
    }
    INFO("model=" << model_name(spec.model));
    CHECK(a0 > 0.0);
  }
}
