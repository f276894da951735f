#pragma once

#include <array>
#include <vector>

#include "solspec/spectral.hpp"

namespace solspec {

/// Zero-energy radial solution F of  F'' = (eps - c Q^2) F,  F(0) = 0,
/// F'(0) = -1, sampled on a uniform grid up to the profile radius.
RadialSolution threshold_solution(const QProfile& profile, double coupling,
                                  double eps, double h = 1e-3);

enum class ResonanceClass { no_resonance, resonance_suspected, inconclusive };

struct WeightedNormRow {
  double r_cut = 0.0;
  std::array<double, 4> norm{};  // integral of psi^2 (1+r)^-gamma r^2, gamma = 0..3
};

struct ResonanceResult {
  double coupling = 0.0;
  double tail_slope = 0.0;     // s in F_0(r) ~ s r + d over the last third
  double intercept = 0.0;      // d
  double fit_residual = 0.0;   // rms deviation from the linear fit
  ResonanceClass classification = ResonanceClass::inconclusive;
  std::vector<WeightedNormRow> weighted_norms;  // truncations R/4, R/2, R
};

/// Threshold classification at the essential-spectrum edge for coupling c.
/// no_resonance requires |slope| above the threshold with a clean linear fit;
/// a fit residual too large relative to the slope yields inconclusive.
ResonanceResult resonance_verdict_coupling(const QProfile& profile, double coupling,
                                           double slope_threshold = 1e-3);

/// Same with c = (3 - beta)/(1 + beta).
ResonanceResult resonance_verdict(const QProfile& profile, double beta,
                                  double slope_threshold = 1e-3);

/// Fitted tail slope of F_0 alone (detector internals, used by the control).
double resonance_tail_slope(const QProfile& profile, double coupling);

/// Detector-sensitivity control: scalar alpha such that the tail slope of the
/// artificially strengthened coupling alpha*c crosses zero.  At that alpha the
/// verdict flips to resonance_suspected.
double synthetic_resonant_scale(const QProfile& profile, double coupling);

struct SturmRecord {
  double r_star = 0.0;            // first zero of G (coupling 3)
  double r_0 = 0.0;               // first zero of F_0 (coupling (3-beta)/(1+beta))
  std::vector<double> eps;        // probed offsets
  std::vector<double> r_eps;      // first zero of F_eps, same order
  int g_zero_count = 0;           // interior zeros of G on (0, R_max)
  double shifted_minimum = 0.0;   // min over r >= 1 of G_*(r)/r
  bool ordering_ok = false;       // r_* <= r_0 <= r_eps, monotone in eps
  bool unique_zero_ok = false;    // g_zero_count == 1
  bool pass = false;
};

/// Zero bookkeeping for the comparison argument: zeros located by bracketing
/// on the stored solution plus bisection on its cubic interpolant.
SturmRecord sturm_record(const QProfile& profile, double beta,
                         const std::vector<double>& eps_grid);

struct ShiftedComparison {
  double eps = 0.0;
  double r_eps = 0.0;
  double r_star = 0.0;
  double min_gap = 0.0;    // min of F - G_* on [0, R_max - max(r_eps, r_*)]
  double min_ratio = 0.0;  // min of G_*(r)/r on [1, R_max - r_*]
  bool pass = false;       // min_gap >= -1e-8 and min_ratio > 0
};

/// Shifted renormalized comparison: F(r) = F_eps(r + r_eps)/F_eps'(r_eps)
/// against G_*(r) = G(r + r_*)/G'(r_*), both vanishing with unit slope at 0.
ShiftedComparison shifted_comparison(const QProfile& profile, double beta, double eps);

struct NonradialIdentity {
  int sector_index = 0;        // spherical-harmonic index k >= 1
  double mu = 0.0;             // angular eigenvalue of the sector
  double rho = 0.0;            // first zero of psi, or R_max if none
  bool rho_is_cutoff = false;  // psi never vanished; boundary-value term active
  double term_boundary_slope = 0.0;  // rho^2 psi'(rho) Q'(rho)
  double term_interior = 0.0;        // (2 - mu) int_0^rho Q' psi dr
  double term_coupling = 0.0;        // -(4b/(1+b)) int_0^rho Q^2 Q' psi r^2 dr
  double term_boundary_value = 0.0;  // -rho^2 psi(rho) Q''(rho); 0 when psi(rho)=0
  double residual = 0.0;             // |sum of all four| / max |term|
  bool sign_term1_ok = false;        // term_boundary_slope >= 0
  bool sign_term2_ok = false;        // term_interior >= 0
  bool sign_term3_ok = false;        // term_coupling > 0 for beta > 0
};

/// Term-by-term Wronskian identity between the zero-energy sector solution
/// psi (angular eigenvalue mu_k, coupling (3-beta)/(1+beta)) and Q'.  The
/// complete integrated-by-parts identity carries the boundary-value term; it
/// vanishes exactly when rho is a zero of psi.
NonradialIdentity nonradial_identity(const QProfile& profile, double beta,
                                     int sector_index, double start_value = 1.0);

/// Angular eigenvalue mu = ell(ell+1) for harmonic index k >= 1
/// (k in [ell^2, (ell+1)^2) belongs to degree ell).
double sector_mu(int sector_index);

}  // namespace solspec
