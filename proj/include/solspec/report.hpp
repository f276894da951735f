#pragma once

#include <string>
#include <vector>

#include "solspec/resonance.hpp"
#include "solspec/system_checks.hpp"

namespace solspec {

struct RunConfig {
  std::vector<double> beta_grid = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  double r_max = 30.0;
  double tol = 1e-11;                                  // integrator tolerance
  std::vector<double> richardson_steps = {4e-3, 2e-3, 1e-3};  // strictly decreasing
  std::vector<int> ell_sectors = {0, 1, 2};
  std::vector<double> embedded_lambdas = {1.1, 1.5, 2.0, 3.0, 5.0};
  double slope_threshold = 1e-3;
  std::string out_dir = ".";
  int workers = 1;
  bool synthetic_control = false;

  void validate() const;  // throws std::invalid_argument on bad fields

  /// Flat key=value text file ('#' comments, blank lines ignored); keys match
  /// the field names, list values comma-separated.  Unknown keys throw.
  static RunConfig from_file(const std::string& path);
  void apply_kv(const std::string& key, const std::string& value);
};

struct BetaRecord {
  double beta = 0.0;
  double lambda_beta = 0.0;
  double err = 0.0;  // eigenvalue error estimate (bisection + dual-engine gap)
  int node_count = 0;
  bool gap_certified = false;  // no spectrum in (0, 1) across scanned sectors
  double resonance_slope = 0.0;
  std::string resonance_verdict;  // no-resonance | resonance-suspected | inconclusive
  double r_star = 0.0;
  double r_0 = 0.0;
  bool monotone_ok = false;  // strictly above the previous row (or lambda0)

  // detail fields (JSON only, not in the CSV row)
  double dual_engine_gap = 0.0;
  bool single_signed = false;
  double rayleigh_discrepancy = 0.0;
  double nonradial_residual = 0.0;
  double shifted_minimum = 0.0;
  double embedded_min_ratio = 0.0;  // smallest envelope ratio over the lambda scan
  bool sturm_pass = false;
  bool pass = false;

  bool operator==(const BetaRecord&) const = default;
};

struct ControlSection {
  bool enabled = false;
  double scale = 0.0;  // coupling multiplier at which the tail slope vanishes
  double slope = 0.0;  // detector slope at that multiplier
  std::string verdict;
  bool pass = false;  // verdict flipped to resonance-suspected

  bool operator==(const ControlSection&) const = default;
};

struct SpectrumReport {
  double lambda0 = 0.0;
  double lambda0_err = 0.0;
  std::string edge_verdict_strong;  // coupling 3 threshold classification
  std::string edge_verdict_weak;    // coupling 1 threshold classification
  std::vector<BetaRecord> records;  // ascending beta
  bool monotone_all = false;
  ControlSection control;
  std::string d_spectrum_summary;  // union rule for the diagonal operator
  bool pass = false;

  bool operator==(const SpectrumReport&) const = default;
};

/// Full verification sweep.  Solves or loads Q (cache q_cache.csv under
/// out_dir), runs every per-beta check over a worker pool, merges results in
/// beta order.
SpectrumReport run_pipeline(const RunConfig& config, const QProfile& profile);

/// Convenience overload that obtains the profile itself (cached).
SpectrumReport run_pipeline(const RunConfig& config);

/// Serialization.  CSV has the fixed column order
/// beta,lambda_beta,err,node_count,gap_certified,resonance_slope,
/// resonance_verdict,r_star,r_0,monotone_ok; 17 significant digits, LF.
std::string report_csv(const SpectrumReport& report);
std::string report_json_text(const SpectrumReport& report, const RunConfig& config);
SpectrumReport report_from_json_text(const std::string& text);

/// Writes report.csv, report.json and the plot series (ground_state.csv,
/// threshold_f0.csv, lambda_vs_beta.csv) under config.out_dir.
void emit_tables(const SpectrumReport& report, const RunConfig& config,
                 const QProfile& profile);

}  // namespace solspec
