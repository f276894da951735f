#include "solspec/report.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace solspec {

namespace {

using nlohmann::json;

std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string trim(const std::string& s) {
  auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

double parse_double(const std::string& s) {
  std::size_t pos = 0;
  double v = std::stod(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("config: bad number '" + s + "'");
  return v;
}

bool parse_bool(const std::string& s) {
  if (s == "1" || s == "true" || s == "yes") return true;
  if (s == "0" || s == "false" || s == "no") return false;
  throw std::invalid_argument("config: bad boolean '" + s + "'");
}

const char* class_name(ResonanceClass c) {
  switch (c) {
    case ResonanceClass::no_resonance: return "no-resonance";
    case ResonanceClass::resonance_suspected: return "resonance-suspected";
    default: return "inconclusive";
  }
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
  if (!out) throw std::runtime_error("short write to " + path);
}

}  // namespace

void RunConfig::validate() const {
  if (beta_grid.empty()) throw std::invalid_argument("config: empty beta grid");
  for (std::size_t i = 0; i < beta_grid.size(); ++i) {
    if (beta_grid[i] < 0.0 || beta_grid[i] >= 1.0)
      throw std::invalid_argument("config: beta values must lie in [0, 1)");
    if (i > 0 && beta_grid[i] <= beta_grid[i - 1])
      throw std::invalid_argument("config: beta grid must be strictly increasing");
  }
  if (r_max < 10.0) throw std::invalid_argument("config: r_max must be >= 10");
  if (tol <= 0.0 || slope_threshold <= 0.0)
    throw std::invalid_argument("config: tolerances must be positive");
  if (richardson_steps.size() < 2)
    throw std::invalid_argument("config: need at least two grid steps");
  for (std::size_t i = 0; i < richardson_steps.size(); ++i) {
    if (richardson_steps[i] <= 0.0)
      throw std::invalid_argument("config: grid steps must be positive");
    if (i > 0 && richardson_steps[i] >= richardson_steps[i - 1])
      throw std::invalid_argument("config: grid steps must be strictly decreasing");
  }
  for (int ell : ell_sectors)
    if (ell < 0) throw std::invalid_argument("config: negative sector index");
  for (double lam : embedded_lambdas)
    if (lam <= 1.0)
      throw std::invalid_argument("config: embedded lambdas must exceed 1");
  if (workers < 1) throw std::invalid_argument("config: workers must be >= 1");
  if (out_dir.empty()) throw std::invalid_argument("config: empty output directory");
}

void RunConfig::apply_kv(const std::string& key, const std::string& value) {
  if (key == "beta_grid") {
    beta_grid.clear();
    for (auto& v : split(value, ',')) beta_grid.push_back(parse_double(v));
  } else if (key == "r_max") {
    r_max = parse_double(value);
  } else if (key == "tol") {
    tol = parse_double(value);
  } else if (key == "richardson_steps") {
    richardson_steps.clear();
    for (auto& v : split(value, ',')) richardson_steps.push_back(parse_double(v));
  } else if (key == "ell_sectors") {
    ell_sectors.clear();
    for (auto& v : split(value, ','))
      ell_sectors.push_back(static_cast<int>(parse_double(v)));
  } else if (key == "embedded_lambdas") {
    embedded_lambdas.clear();
    for (auto& v : split(value, ',')) embedded_lambdas.push_back(parse_double(v));
  } else if (key == "slope_threshold") {
    slope_threshold = parse_double(value);
  } else if (key == "out_dir") {
    out_dir = value;
  } else if (key == "workers") {
    workers = static_cast<int>(parse_double(value));
  } else if (key == "synthetic_control") {
    synthetic_control = parse_bool(value);
  } else {
    throw std::invalid_argument("config: unknown key '" + key + "'");
  }
}

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path);
  RunConfig cfg;
  std::string line;
  while (std::getline(in, line)) {
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto eq = t.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: expected key=value, got '" + t + "'");
    cfg.apply_kv(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
  return cfg;
}

namespace {

BetaRecord beta_job(const RunConfig& cfg, const QProfile& prof, double lambda0,
                    double lambda0_err, double beta) {
  BetaRecord rec;
  rec.beta = beta;
  const double c = coupling_coefficient(beta);
  OperatorSpec op{c, 0, &prof};

  std::optional<EigenResult> shot;
  if (beta == 0.0) {
    shot = eigen_shooting(op, -20.0, -1e-8);
  } else {
    shot = eigen_shooting(op, lambda0 - 0.5, -1e-10);
  }
  if (!shot) throw std::runtime_error("pipeline: first eigenvalue not found");
  auto rich = eigen_richardson(op, shot->lambda - 0.1, shot->lambda + 0.1,
                               cfg.richardson_steps);
  if (rich.empty()) throw std::runtime_error("pipeline: grid engine found nothing");
  rec.lambda_beta = shot->lambda;
  rec.node_count = shot->node_count;
  rec.dual_engine_gap = std::abs(shot->lambda - rich[0].lambda);
  rec.err = shot->error_estimate + rec.dual_engine_gap;
  rec.single_signed = shot->node_count == 0;

  // spectral gap over the scanned sectors, plus "0 is not an eigenvalue"
  const double delta = 1e-6;
  rec.gap_certified = rec.lambda_beta < 0.0;
  for (int ell : cfg.ell_sectors) {
    OperatorSpec sector{c, ell, &prof};
    int n_hi = count_below(sector, 1.0 - delta);
    int n_p = count_below(sector, delta);
    int n_m = count_below(sector, -delta);
    if (ell == 0) {
      if (n_hi != 1 || n_p != 1 || n_m != 1) rec.gap_certified = false;
    } else {
      if (n_hi != 0) rec.gap_certified = false;
    }
    if (n_p != n_m) rec.gap_certified = false;  // eigenvalue hiding at 0
  }

  ResonanceResult rr = resonance_verdict(prof, beta, cfg.slope_threshold);
  rec.resonance_slope = rr.tail_slope;
  rec.resonance_verdict = class_name(rr.classification);

  double eps_base = 1.0 - rec.lambda_beta;
  SturmRecord sturm =
      sturm_record(prof, beta, {0.1 * eps_base, 0.3 * eps_base, 0.5 * eps_base});
  rec.r_star = sturm.r_star;
  rec.r_0 = sturm.r_0;
  rec.shifted_minimum = sturm.shifted_minimum;
  rec.sturm_pass = sturm.pass;

  rec.rayleigh_discrepancy = rayleigh_identity(prof, beta).discrepancy;
  rec.nonradial_residual = nonradial_identity(prof, beta, 1).residual;

  double min_ratio = 1e300;
  for (const auto& row : embedded_scan(op, cfg.embedded_lambdas))
    min_ratio = std::min(min_ratio, row.envelope_ratio);
  rec.embedded_min_ratio = cfg.embedded_lambdas.empty() ? 1.0 : min_ratio;

  rec.pass = rec.gap_certified && rec.single_signed && rec.sturm_pass &&
             rec.resonance_verdict == "no-resonance" && rec.dual_engine_gap < 1e-6 &&
             rec.rayleigh_discrepancy < 1e-7 && rec.nonradial_residual < 1e-6 &&
             rec.embedded_min_ratio > 0.1 &&
             rec.lambda_beta > lambda0 - lambda0_err;
  return rec;
}

}  // namespace

SpectrumReport run_pipeline(const RunConfig& config, const QProfile& profile) {
  config.validate();
  SpectrumReport rep;

  OperatorSpec l0{3.0, 0, &profile};
  auto ground = eigen_shooting(l0, -20.0, -1e-8);
  if (!ground) throw std::runtime_error("pipeline: reference eigenvalue not found");
  rep.lambda0 = ground->lambda;
  rep.lambda0_err = ground->error_estimate;

  rep.edge_verdict_strong = class_name(
      resonance_verdict_coupling(profile, 3.0, config.slope_threshold).classification);
  rep.edge_verdict_weak = class_name(
      resonance_verdict_coupling(profile, 1.0, config.slope_threshold).classification);

  rep.records.resize(config.beta_grid.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::string error_text;
  std::mutex error_mutex;
  auto worker = [&]() {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= config.beta_grid.size() || failed.load()) return;
      try {
        rep.records[i] = beta_job(config, profile, rep.lambda0, rep.lambda0_err,
                                  config.beta_grid[i]);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(error_mutex);
        failed.store(true);
        if (error_text.empty()) error_text = e.what();
      }
    }
  };
  const int nthreads =
      std::min<int>(config.workers, static_cast<int>(config.beta_grid.size()));
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failed.load()) throw std::runtime_error("pipeline: " + error_text);

  rep.monotone_all = true;
  for (std::size_t i = 0; i < rep.records.size(); ++i) {
    BetaRecord& r = rep.records[i];
    double prev = (i == 0) ? rep.lambda0 : rep.records[i - 1].lambda_beta;
    r.monotone_ok = (i == 0 && r.beta == 0.0) ? std::abs(r.lambda_beta - prev) <= 1e-9
                                              : r.lambda_beta > prev;
    if (!r.monotone_ok) rep.monotone_all = false;
    if (r.lambda_beta >= 0.0) rep.monotone_all = false;
  }
  for (auto& r : rep.records)
    if (!r.monotone_ok) r.pass = false;

  if (config.synthetic_control) {
    double beta_mid = config.beta_grid[config.beta_grid.size() / 2];
    double c_mid = coupling_coefficient(beta_mid);
    rep.control.enabled = true;
    rep.control.scale = synthetic_resonant_scale(profile, c_mid);
    ResonanceResult flipped = resonance_verdict_coupling(
        profile, rep.control.scale * c_mid, config.slope_threshold);
    rep.control.slope = flipped.tail_slope;
    rep.control.verdict = class_name(flipped.classification);
    rep.control.pass =
        flipped.classification == ResonanceClass::resonance_suspected;
  }

  rep.d_spectrum_summary =
      "{" + fmt17(rep.lambda0) + "} U {lambda_beta per row} U [1,inf); "
      "1 excluded by the gap and threshold certificates of both couplings";

  rep.pass = rep.monotone_all && rep.edge_verdict_strong == "no-resonance" &&
             rep.edge_verdict_weak == "no-resonance" &&
             (!rep.control.enabled || rep.control.pass);
  for (const auto& r : rep.records) rep.pass = rep.pass && r.pass;
  return rep;
}

SpectrumReport run_pipeline(const RunConfig& config) {
  config.validate();
  GroundStateParams params;
  params.r_max = config.r_max;
  params.ode_tol = config.tol;
  QProfile profile =
      ground_state_cached(config.out_dir + "/q_cache.csv", 1e-12, params);
  return run_pipeline(config, profile);
}

std::string report_csv(const SpectrumReport& report) {
  std::string out =
      "beta,lambda_beta,err,node_count,gap_certified,resonance_slope,"
      "resonance_verdict,r_star,r_0,monotone_ok\n";
  for (const auto& r : report.records) {
    out += fmt17(r.beta) + "," + fmt17(r.lambda_beta) + "," + fmt17(r.err) + "," +
           std::to_string(r.node_count) + "," + (r.gap_certified ? "1" : "0") + "," +
           fmt17(r.resonance_slope) + "," + r.resonance_verdict + "," +
           fmt17(r.r_star) + "," + fmt17(r.r_0) + "," + (r.monotone_ok ? "1" : "0") +
           "\n";
  }
  return out;
}

namespace {

json record_to_json(const BetaRecord& r) {
  return json{{"beta", r.beta},
              {"lambda_beta", r.lambda_beta},
              {"err", r.err},
              {"node_count", r.node_count},
              {"gap_certified", r.gap_certified},
              {"resonance_slope", r.resonance_slope},
              {"resonance_verdict", r.resonance_verdict},
              {"r_star", r.r_star},
              {"r_0", r.r_0},
              {"monotone_ok", r.monotone_ok},
              {"dual_engine_gap", r.dual_engine_gap},
              {"single_signed", r.single_signed},
              {"rayleigh_discrepancy", r.rayleigh_discrepancy},
              {"nonradial_residual", r.nonradial_residual},
              {"shifted_minimum", r.shifted_minimum},
              {"embedded_min_ratio", r.embedded_min_ratio},
              {"sturm_pass", r.sturm_pass},
              {"pass", r.pass}};
}

BetaRecord record_from_json(const json& j) {
  BetaRecord r;
  r.beta = j.at("beta");
  r.lambda_beta = j.at("lambda_beta");
  r.err = j.at("err");
  r.node_count = j.at("node_count");
  r.gap_certified = j.at("gap_certified");
  r.resonance_slope = j.at("resonance_slope");
  r.resonance_verdict = j.at("resonance_verdict");
  r.r_star = j.at("r_star");
  r.r_0 = j.at("r_0");
  r.monotone_ok = j.at("monotone_ok");
  r.dual_engine_gap = j.at("dual_engine_gap");
  r.single_signed = j.at("single_signed");
  r.rayleigh_discrepancy = j.at("rayleigh_discrepancy");
  r.nonradial_residual = j.at("nonradial_residual");
  r.shifted_minimum = j.at("shifted_minimum");
  r.embedded_min_ratio = j.at("embedded_min_ratio");
  r.sturm_pass = j.at("sturm_pass");
  r.pass = j.at("pass");
  return r;
}

}  // namespace

std::string report_json_text(const SpectrumReport& report, const RunConfig& config) {
  json j;
  j["lambda0"] = report.lambda0;
  j["lambda0_err"] = report.lambda0_err;
  j["edge_verdict_strong"] = report.edge_verdict_strong;
  j["edge_verdict_weak"] = report.edge_verdict_weak;
  j["monotone_all"] = report.monotone_all;
  j["d_spectrum_summary"] = report.d_spectrum_summary;
  j["pass"] = report.pass;
  j["control"] = {{"enabled", report.control.enabled},
                  {"scale", report.control.scale},
                  {"slope", report.control.slope},
                  {"verdict", report.control.verdict},
                  {"pass", report.control.pass}};
  j["tolerances"] = {{"integrator_tol", config.tol},
                     {"slope_threshold", config.slope_threshold},
                     {"count_delta", 1e-6},
                     {"dual_engine_tol", 1e-6},
                     {"rayleigh_tol", 1e-7},
                     {"nonradial_tol", 1e-6},
                     {"shifted_comparison_tol", 1e-8}};
  j["config"] = {{"beta_grid", config.beta_grid},
                 {"r_max", config.r_max},
                 {"richardson_steps", config.richardson_steps},
                 {"ell_sectors", config.ell_sectors},
                 {"embedded_lambdas", config.embedded_lambdas},
                 {"workers", config.workers},
                 {"synthetic_control", config.synthetic_control}};
  j["records"] = json::array();
  for (const auto& r : report.records) j["records"].push_back(record_to_json(r));
  return j.dump(2) + "\n";
}

SpectrumReport report_from_json_text(const std::string& text) {
  json j = json::parse(text);
  SpectrumReport rep;
  rep.lambda0 = j.at("lambda0");
  rep.lambda0_err = j.at("lambda0_err");
  rep.edge_verdict_strong = j.at("edge_verdict_strong");
  rep.edge_verdict_weak = j.at("edge_verdict_weak");
  rep.monotone_all = j.at("monotone_all");
  rep.d_spectrum_summary = j.at("d_spectrum_summary");
  rep.pass = j.at("pass");
  const json& c = j.at("control");
  rep.control.enabled = c.at("enabled");
  rep.control.scale = c.at("scale");
  rep.control.slope = c.at("slope");
  rep.control.verdict = c.at("verdict");
  rep.control.pass = c.at("pass");
  for (const auto& r : j.at("records")) rep.records.push_back(record_from_json(r));
  return rep;
}

void emit_tables(const SpectrumReport& report, const RunConfig& config,
                 const QProfile& profile) {
  const std::string dir = config.out_dir;
  write_file(dir + "/report.csv", report_csv(report));
  write_file(dir + "/report.json", report_json_text(report, config));

  std::string gs = "r,Q\n";
  for (std::size_t i = 0; i < profile.grid.size(); ++i)
    gs += fmt17(profile.grid.nodes[i]) + "," + fmt17(profile.q[i]) + "\n";
  write_file(dir + "/ground_state.csv", gs);

  std::string lb = "beta,lambda_beta\n";
  for (const auto& r : report.records)
    lb += fmt17(r.beta) + "," + fmt17(r.lambda_beta) + "\n";
  write_file(dir + "/lambda_vs_beta.csv", lb);

  std::vector<RadialSolution> f0s;
  for (double beta : config.beta_grid)
    f0s.push_back(
        threshold_solution(profile, coupling_coefficient(beta), 0.0, 1e-2));
  std::string th = "r";
  for (double beta : config.beta_grid) th += ",F0_beta_" + fmt17(beta);
  th += "\n";
  for (std::size_t i = 0; i < f0s.front().size(); ++i) {
    th += fmt17(f0s.front().grid.nodes[i]);
    for (const auto& f : f0s) th += "," + fmt17(f.u[i]);
    th += "\n";
  }
  write_file(dir + "/threshold_f0.csv", th);
}

}  // namespace solspec
