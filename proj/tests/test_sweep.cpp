#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "qlsoliton/sweep.hpp"

using namespace qls;

namespace {

SolverConfig base_config(int n = 1001, double R = 18.0) {
  SolverConfig cfg;
  cfg.model = ModelSpec::power(0.01, 3.0);
  cfg.potential = PotentialSpec::constant(1.0);
  cfg.grid_nodes = n;
  cfg.radius = R;
  cfg.adaptive_radius = false;
  cfg.compute_comparison_level = true;
  return cfg;
}

}  // namespace

TEST_CASE("single-kappa sweep equals one solve plus verify") {
  SolverConfig cfg = base_config();
  SweepResult r = kappa_sweep(cfg, {0.01});
  REQUIRE(r.entries.size() == 1);
  const auto& e = r.entries[0];
  CHECK(e.failure.empty());
  CHECK(e.converged);

  Solution s = mountain_pass_solve(cfg);
  s.energy.comparison_level = r.comparison_level;
  auto rep = verify_solution(s);
  CHECK(e.linf_u == Catch::Approx(rep.linf_u).epsilon(1e-12));
  CHECK(e.all_pass == rep.all_pass);
  CHECK(e.j_value == Catch::Approx(s.energy.j_value).epsilon(1e-12));
}

TEST_CASE("sweep is deterministic and sorted, entries survive failures") {
  SolverConfig cfg = base_config(401, 16.0);
  std::vector<double> kappas = {0.02, 0.004, 0.01};
  SweepResult a = kappa_sweep(cfg, kappas);
  SweepResult b = kappa_sweep(cfg, kappas);
  REQUIRE(a.entries.size() == 3);
  CHECK(a.entries[0].kappa == 0.004);
  CHECK(a.entries[2].kappa == 0.02);
  for (size_t i = 0; i < a.entries.size(); ++i) {
    CHECK(a.entries[i].linf_u == b.entries[i].linf_u);
    CHECK(a.entries[i].j_value == b.entries[i].j_value);
    CHECK(a.entries[i].all_pass == b.entries[i].all_pass);
  }
  CHECK(a.empirical_threshold == b.empirical_threshold);
  CHECK(a.formula_threshold == b.formula_threshold);
}

TEST_CASE("pass prefix: low kappa passes, high kappa fails the threshold") {
  SolverConfig cfg = base_config(1001, 18.0);
  SweepResult r = kappa_sweep(cfg, {0.004, 0.01, 0.05, 0.1});
  REQUIRE(r.entries.size() == 4);
  CHECK(r.entries[0].all_pass);
  CHECK_FALSE(r.entries[3].all_pass);       // far above the empirical threshold
  CHECK(r.monotone);                        // clean pass prefix
  CHECK(r.empirical_threshold >= 0.004);
  CHECK(r.empirical_threshold < 0.05);
  // conservativity: the formula threshold never exceeds the empirical one
  CHECK(r.formula_threshold > 0.0);
  CHECK(r.formula_threshold <= r.empirical_threshold);
}

TEST_CASE("sweep rejects bad kappa lists") {
  SolverConfig cfg = base_config(401, 16.0);
  CHECK_THROWS_AS(kappa_sweep(cfg, {}), ConfigError);
  CHECK_THROWS_AS(kappa_sweep(cfg, {-0.1, 0.05}), ConfigError);
}

TEST_CASE("threshold bisection contract") {
  SolverConfig cfg = base_config(1001, 18.0);
  cfg.compute_comparison_level = false;
  // degenerate bracket returns lo
  CHECK(find_threshold(cfg, 0.01, 0.01, 1e-3) == 0.01);
  // halving tol halves the bracket: both runs agree within the larger tol
  const double t1 = find_threshold(cfg, 0.004, 0.08, 0.02);
  const double t2 = find_threshold(cfg, 0.004, 0.08, 0.01);
  CHECK(std::abs(t1 - t2) <= 0.02);
  CHECK(t1 >= 0.004);
  CHECK(t1 <= 0.08);
  // failing lower bracket is a contract violation
  CHECK_THROWS_AS(find_threshold(cfg, 0.2, 0.3, 1e-2), ConfigError);
}
