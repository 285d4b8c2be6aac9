// qlsoliton command-line front-end: solve / verify / sweep / table.
//
// Exit codes: 0 ok, 2 config error, 3 solve failure, 4 certificate failure,
// 5 io error.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "qlsoliton/io.hpp"

namespace fs = std::filesystem;
using namespace qls;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kSolverFailure = 3;
constexpr int kCertificateFailure = 4;
constexpr int kIoError = 5;

struct CommonOpts {
  std::string config_path;
  std::string out_dir;  // overrides [output] dir when nonempty
  int grid_n = 0;       // 0 = keep config value
  double radius = 0.0;
  double kappa = -1.0;  // negative = keep config value
  bool quiet = false;
};

RunConfig load_config(const CommonOpts& o) {
  RunConfig cfg = parse_config(detail::read_text(o.config_path));
  if (!o.out_dir.empty()) cfg.out_dir = o.out_dir;
  if (o.grid_n > 0) cfg.solver.grid_nodes = o.grid_n;
  if (o.radius > 0.0) cfg.solver.radius = o.radius;
  if (o.kappa >= 0.0) {
    cfg.solver.model.kappa = o.kappa;
    cfg.solver.model.semilinear_reference = (o.kappa == 0.0);
  }
  cfg.solver.validate();
  return cfg;
}

void print_line(bool quiet, const std::string& s) {
  if (!quiet) std::cout << s << "\n";
}

void print_report(const VerificationReport& r, bool quiet) {
  if (quiet) return;
  auto row = [](const std::string& name, const std::string& value, bool applicable,
                bool pass) {
    std::printf("  %-34s %-24s %s\n", name.c_str(), value.c_str(),
                applicable ? (pass ? "pass" : "FAIL") : "n/a");
  };
  char buf[128];
  std::printf("certificates:\n");
  std::snprintf(buf, sizeof(buf), "max %.3e", r.pde_residual_max);
  row("pde residual (modified eq.)", buf, true, r.pde_pass);
  std::snprintf(buf, sizeof(buf), "max %.3e", r.original_residual_max);
  row("pde residual (original eq.)", buf, true, r.original_pass);
  std::snprintf(buf, sizeof(buf), "|u|=%.6g < %.6g", r.linf_u, r.linf_threshold);
  row("L-infinity threshold", buf, true, r.linf_pass);
  std::snprintf(buf, sizeof(buf), "%.6g <= %.6g", r.energy_bound_lhs, r.energy_bound_rhs);
  row("energy bound", buf, true, r.energy_bound_pass);
  std::snprintf(buf, sizeof(buf), "resid %.3e", r.pohozaev_residual);
  row("pohozaev identity", buf, r.pohozaev_applicable, r.pohozaev_pass);
  std::snprintf(buf, sizeof(buf), "C0=%.4g bound=%.4g", r.moser_c0, r.moser_linf_bound);
  row("moser chain (3 iterates)", buf, r.moser_applicable, r.moser_pass);
  std::snprintf(buf, sizeof(buf), "delta=%.4g R2=%.4f", r.decay_rate, r.decay_fit_r2);
  row("positivity/monotonic/decay", buf, r.qualitative_applicable,
      r.nontrivial_pass && r.positivity_pass && r.monotonicity_pass && r.decay_pass);
  std::printf("  kappa threshold formula: %.6g\n", r.kappa_threshold_formula_value);
  std::printf("  overall: %s\n", r.all_pass ? "pass" : "FAIL");
}

int run_solve(const CommonOpts& o) {
  RunConfig cfg = load_config(o);
  fs::create_directories(cfg.out_dir);
  Solution sol = mountain_pass_solve(cfg.solver);
  const std::string profile = "profile.csv";
  write_profile_csv((fs::path(cfg.out_dir) / profile).string(), sol);
  ordered_json sj = solution_to_json(sol, profile);
  sj["config"] = serialize_config(cfg);
  detail::write_text((fs::path(cfg.out_dir) / "solution.json").string(), sj.dump(2) + "\n");
  print_line(o.quiet, "solve: converged=" + std::string(sol.converged ? "yes" : "no") +
                          " iterations=" + std::to_string(sol.iterations) +
                          " J=" + detail::real17(sol.energy.j_value) +
                          " grad_norm=" + detail::real17(sol.energy.grad_norm));
  if (!sol.converged) {
    std::cerr << "solve: did not converge within max_iters\n";
    return kSolverFailure;
  }
  VerificationReport rep = verify_solution(sol);
  detail::write_text((fs::path(cfg.out_dir) / "verification.json").string(),
                     verification_to_json(rep).dump(2) + "\n");
  print_report(rep, o.quiet);
  return rep.all_pass ? kOk : kCertificateFailure;
}

int run_verify(const std::string& solution_path, const CommonOpts& o) {
  const fs::path spath(solution_path);
  ordered_json sj = ordered_json::parse(detail::read_text(solution_path));
  Solution sol = solution_from_json(sj, spath.parent_path().string());
  VerificationReport rep = verify_solution(sol);
  const std::string out_dir = o.out_dir.empty() ? spath.parent_path().string() : o.out_dir;
  if (!out_dir.empty()) fs::create_directories(out_dir);
  detail::write_text((fs::path(out_dir) / "verification.json").string(),
                     verification_to_json(rep).dump(2) + "\n");
  print_report(rep, o.quiet);
  return rep.all_pass ? kOk : kCertificateFailure;
}

int run_sweep(const CommonOpts& o) {
  RunConfig cfg = load_config(o);
  fs::create_directories(cfg.out_dir);
  SweepResult result = kappa_sweep(cfg.solver, sweep_kappas(cfg.sweep));
  if (cfg.sweep.bisect && result.empirical_threshold > 0.0) {
    double hi = cfg.sweep.kappa_max;
    bool warn = false;
    SolverConfig base = cfg.solver;
    base.compute_comparison_level = false;
    result.empirical_threshold = find_threshold(base, result.empirical_threshold, hi,
                                                cfg.sweep.bisect_tol, VerifyOptions{}, &warn);
  }
  detail::write_text((fs::path(cfg.out_dir) / "sweep.json").string(),
                     sweep_to_json(result).dump(2) + "\n");
  write_sweep_csv((fs::path(cfg.out_dir) / "sweep.csv").string(), result);
  if (!o.quiet) {
    for (const auto& e : result.entries) {
      if (!e.failure.empty())
        std::printf("kappa=%-10.4g solve failed: %s\n", e.kappa, e.failure.c_str());
      else
        std::printf("kappa=%-10.4g |u|=%-10.5g thr=%-10.5g %s\n", e.kappa, e.linf_u,
                    e.linf_threshold, e.all_pass ? "pass" : "fail");
    }
    std::printf("empirical threshold: %.6g\n", result.empirical_threshold);
    std::printf("formula threshold:   %.6g\n", result.formula_threshold);
  }
  for (const auto& e : result.entries)
    if (!e.failure.empty()) return kSolverFailure;
  return kOk;
}

int run_table(const CommonOpts& o, bool have_config) {
  RunConfig cfg;
  if (have_config) {
    cfg = load_config(o);
  } else {
    cfg.solver.model = ModelSpec::power(o.kappa >= 0.0 ? o.kappa : 0.1, 3.0);
    if (!o.out_dir.empty()) cfg.out_dir = o.out_dir;
  }
  const std::string csv =
      transform_table_csv(cfg.solver.model, cfg.table.t_max, cfg.table.samples);
  if (have_config || !o.out_dir.empty()) {
    fs::create_directories(cfg.out_dir);
    detail::write_text((fs::path(cfg.out_dir) / "table.csv").string(), csv);
  }
  if (!o.quiet) std::cout << csv;
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qlsoliton: quasilinear Schrodinger soliton solver and certificate suite"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  CommonOpts opts;
  std::string solution_path;

  auto add_common = [&](CLI::App* sub, bool need_config) {
    auto* c = sub->add_option("--config", opts.config_path, "config file path");
    if (need_config) c->required();
    sub->add_option("--out", opts.out_dir, "output directory override");
    sub->add_option("--grid-n", opts.grid_n, "grid nodes override");
    sub->add_option("--radius", opts.radius, "truncation radius override");
    sub->add_option("--kappa", opts.kappa, "kappa override");
    sub->add_flag("--quiet", opts.quiet, "suppress normal output");
  };

  auto* solve = app.add_subcommand("solve", "compute a soliton profile and certify it");
  add_common(solve, true);
  auto* verify = app.add_subcommand("verify", "re-run certificates on a stored solution");
  verify->add_option("--solution", solution_path, "solution.json path")->required();
  verify->add_option("--out", opts.out_dir, "output directory override");
  verify->add_flag("--quiet", opts.quiet, "suppress normal output");
  auto* sweep = app.add_subcommand("sweep", "parameter study in kappa");
  add_common(sweep, true);
  auto* table = app.add_subcommand("table", "emit the transform table as CSV");
  add_common(table, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) return run_solve(opts);
    if (verify->parsed()) return run_verify(solution_path, opts);
    if (sweep->parsed()) return run_sweep(opts);
    if (table->parsed()) return run_table(opts, !opts.config_path.empty());
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kSolverFailure;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kIoError;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kIoError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kSolverFailure;
  }
  return kOk;
}
