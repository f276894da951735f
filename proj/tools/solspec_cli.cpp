// Command-line front end: ground-state / spectrum / resonance / verify-all /
// report.  Exit codes: 0 pass, 1 verification failure, 2 usage or config
// error, 3 internal numeric fault.
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>

#include "solspec/report.hpp"

using namespace solspec;

namespace {

struct CommonFlags {
  std::optional<double> beta;
  std::optional<std::string> beta_grid;
  std::optional<double> rmax;
  std::optional<double> tol;
  std::optional<std::string> out;
  std::optional<int> workers;
  std::optional<std::string> config_path;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--beta", f.beta, "single coupling parameter in [0, 1)");
  cmd->add_option("--beta-grid", f.beta_grid, "comma-separated beta values");
  cmd->add_option("--rmax", f.rmax, "truncation radius");
  cmd->add_option("--tol", f.tol, "integrator tolerance");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--workers", f.workers, "worker thread count");
  cmd->add_option("--config", f.config_path, "key=value config file");
}

RunConfig build_config(const CommonFlags& f) {
  RunConfig cfg;
  if (f.config_path) cfg = RunConfig::from_file(*f.config_path);
  if (f.beta_grid) cfg.apply_kv("beta_grid", *f.beta_grid);
  if (f.beta) cfg.beta_grid = {*f.beta};
  if (f.rmax) cfg.r_max = *f.rmax;
  if (f.tol) cfg.tol = *f.tol;
  if (f.out) cfg.out_dir = *f.out;
  if (f.workers) cfg.workers = *f.workers;
  cfg.validate();
  return cfg;
}

QProfile profile_for(const RunConfig& cfg) {
  GroundStateParams params;
  params.r_max = cfg.r_max;
  params.ode_tol = cfg.tol;
  return ground_state_cached(cfg.out_dir + "/q_cache.csv", 1e-12, params);
}

int cmd_ground_state(const RunConfig& cfg) {
  QProfile prof = profile_for(cfg);
  std::printf("center value Q(0)      %.12f\n", prof.center_value);
  std::printf("decay rate             %.12f\n", prof.decay_rate);
  std::printf("tail amplitude         %.12f\n", prof.tail_amp);
  std::printf("ODE residual (sup)     %.3e\n", prof.residual_sup);
  std::printf("cache                  %s/q_cache.csv\n", cfg.out_dir.c_str());
  return prof.residual_sup < 1e-8 ? 0 : 1;
}

int cmd_spectrum(const RunConfig& cfg) {
  QProfile prof = profile_for(cfg);
  OperatorSpec l0{3.0, 0, &prof};
  auto ground = eigen_shooting(l0, -20.0, -1e-8);
  if (!ground) throw std::runtime_error("reference eigenvalue not found");
  bool ok = true;
  std::printf("lambda0 = %.12f\n", ground->lambda);
  for (double beta : cfg.beta_grid) {
    OperatorSpec op{coupling_coefficient(beta), 0, &prof};
    auto shot = beta == 0.0 ? ground
                            : eigen_shooting(op, ground->lambda - 0.5, -1e-10);
    if (!shot) throw std::runtime_error("eigenvalue not found");
    auto rich = eigen_richardson(op, shot->lambda - 0.1, shot->lambda + 0.1,
                                 cfg.richardson_steps);
    double gap = rich.empty() ? 1.0 : std::abs(shot->lambda - rich[0].lambda);
    int below_one = count_below(op, 1.0 - 1e-6);
    bool row_ok = shot->lambda < 0.0 && shot->node_count == 0 && below_one == 1 &&
                  gap < 1e-6;
    ok = ok && row_ok;
    std::printf("beta=%.3f  lambda=%.12f  nodes=%d  below_1=%d  engine_gap=%.2e  %s\n",
                beta, shot->lambda, shot->node_count, below_one, gap,
                row_ok ? "ok" : "FAIL");
  }
  return ok ? 0 : 1;
}

int cmd_resonance(const RunConfig& cfg) {
  QProfile prof = profile_for(cfg);
  bool ok = true;
  for (double beta : cfg.beta_grid) {
    ResonanceResult r = resonance_verdict(prof, beta, cfg.slope_threshold);
    bool row_ok = r.classification == ResonanceClass::no_resonance;
    ok = ok && row_ok;
    std::printf("beta=%.3f  coupling=%.6f  slope=%.9f  fit_rms=%.2e  %s\n", beta,
                r.coupling, r.tail_slope, r.fit_residual,
                row_ok ? "no-resonance" : "NOT CERTIFIED");
  }
  return ok ? 0 : 1;
}

int cmd_verify_all(const RunConfig& cfg, bool with_tables) {
  QProfile prof = profile_for(cfg);
  SpectrumReport rep = run_pipeline(cfg, prof);
  emit_tables(rep, cfg, prof);
  std::printf("lambda0 = %.12f (err %.1e)\n", rep.lambda0, rep.lambda0_err);
  std::printf("edge thresholds: coupling 3 -> %s, coupling 1 -> %s\n",
              rep.edge_verdict_strong.c_str(), rep.edge_verdict_weak.c_str());
  for (const auto& r : rep.records)
    std::printf(
        "beta=%.3f lambda=%.12f gap=%d verdict=%s monotone=%d %s\n", r.beta,
        r.lambda_beta, r.gap_certified, r.resonance_verdict.c_str(), r.monotone_ok,
        r.pass ? "pass" : "FAIL");
  if (rep.control.enabled)
    std::printf("synthetic control: scale=%.9f verdict=%s %s\n", rep.control.scale,
                rep.control.verdict.c_str(), rep.control.pass ? "pass" : "FAIL");
  std::printf("overall: %s\n", rep.pass ? "pass" : "FAIL");
  if (with_tables)
    std::printf("tables written under %s\n", cfg.out_dir.c_str());
  return rep.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spectral verification toolkit for the radial ground state"};
  app.require_subcommand(1);
  CommonFlags flags;

  CLI::App* ground = app.add_subcommand("ground-state", "solve and cache Q");
  CLI::App* spectrum = app.add_subcommand("spectrum", "first eigenvalue per beta");
  CLI::App* resonance = app.add_subcommand("resonance", "threshold classification");
  CLI::App* verify = app.add_subcommand("verify-all", "full verification sweep");
  CLI::App* report = app.add_subcommand("report", "sweep plus all table artifacts");
  for (CLI::App* c : {ground, spectrum, resonance, verify, report})
    add_common(c, flags);
  bool control = false;
  verify->add_flag("--synthetic-control", control, "run the detector-sensitivity control");
  report->add_flag("--synthetic-control", control, "run the detector-sensitivity control");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    RunConfig cfg = build_config(flags);
    if (control) cfg.synthetic_control = true;
    if (ground->parsed()) return cmd_ground_state(cfg);
    if (spectrum->parsed()) return cmd_spectrum(cfg);
    if (resonance->parsed()) return cmd_resonance(cfg);
    if (verify->parsed()) return cmd_verify_all(cfg, false);
    if (report->parsed()) return cmd_verify_all(cfg, true);
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "numeric fault: %s\n", e.what());
    return 3;
  }
}
