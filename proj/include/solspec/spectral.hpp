#pragma once

#include <optional>
#include <string>
#include <vector>

#include "solspec/operators.hpp"

namespace solspec {

enum class EigenMethod { tridiagonal_bisection, shooting_match };

struct EigenResult {
  double lambda = 0.0;
  int node_count = 0;
  RadialSolution eigenfunction;  // u = r psi, unit discrete L2 norm, u'(0+) > 0
  EigenMethod method = EigenMethod::tridiagonal_bisection;
  double error_estimate = 0.0;
};

/// All discretized eigenvalues in (lambda_lo, lambda_hi), symmetric
/// tridiagonal bisection with Sturm-sequence counts, eigenvectors by inverse
/// iteration.  A window touching 1 is clipped to 1 - delta (reported through
/// *clipped).
std::vector<EigenResult> eigen_tridiagonal(const OperatorSpec& op, double lambda_lo,
                                           double lambda_hi, double h,
                                           double delta = 1e-6,
                                           bool* clipped = nullptr);

/// h^2 Richardson extrapolation over the given step list (finest last).
/// Eigenfunctions come from the finest grid; error estimates from the
/// extrapolation correction.
std::vector<EigenResult> eigen_richardson(const OperatorSpec& op, double lambda_lo,
                                          double lambda_hi,
                                          const std::vector<double>& steps = {4e-3, 2e-3, 1e-3});

/// Wronskian-matching shooting engine: regular solution from the origin
/// against the decaying solution from R_max.  Empty result when the matching
/// function does not change sign over the bracket ("no eigenvalue").
std::optional<EigenResult> eigen_shooting(const OperatorSpec& op, double lambda_lo,
                                          double lambda_hi, double tol = 1e-10);

/// Interior zeros of the regular solution at spectral parameter lambda_star
/// = number of eigenvalues strictly below lambda_star (oscillation theorem).
int count_below(const OperatorSpec& op, double lambda_star);

/// Sup-norm finite-difference residual of (op - lambda) applied to the
/// eigenfunction on its own grid, relative to sup |u|.
double eigen_residual(const OperatorSpec& op, const RadialSolution& ef, double lambda);

struct MonotonicityRow {
  double beta = 0.0;
  double lambda = 0.0;
  double error_estimate = 0.0;
};

struct MonotonicityReport {
  std::vector<MonotonicityRow> rows;  // ordered by beta
  double lambda0 = 0.0;               // reference first eigenvalue of L_0
  bool strictly_increasing = false;
  bool all_negative = false;
  bool all_above_lambda0 = false;
  bool pass = false;
};

/// lambda_beta over a strictly increasing beta grid in [0, 1), via the
/// shooting engine; asserts the ordering lambda_0 <= ... strictly increasing
/// and everything in (lambda0, 0).
MonotonicityReport verify_monotonicity(const QProfile& profile,
                                       const std::vector<double>& beta_grid);

struct GlazmanReport {
  double beta = 0.0;
  double lambda0 = 0.0;
  double mu1 = 0.0;          // first eigenvalue of L_beta
  int count_below_one = 0;   // eigenvalues below 1 - delta
  bool first_bound_ok = false;   // mu1 >= lambda0 - tol
  bool second_bound_ok = false;  // no second eigenvalue below 0 (vacuous if none < 1)
  bool pass = false;
};

GlazmanReport verify_glazman_bounds(const QProfile& profile, double beta,
                                    double tol = 1e-8);

struct RayleighResult {
  double quadratic_form = 0.0;  // <L_beta Q, Q> by quadrature
  double closed_form = 0.0;     // -(2(1-beta)/(1+beta)) <Q^4, 1>
  double discrepancy = 0.0;     // relative (absolute when closed form ~ 0)
};

RayleighResult rayleigh_identity(const QProfile& profile, double beta);

struct EmbeddedScanRow {
  double lambda = 0.0;
  double envelope_ratio = 0.0;  // late-window envelope sup / mid-window sup
};

/// Oscillation-envelope scan over lambda > 1: an embedded eigenvalue would
/// force the ratio toward zero; free scattering keeps it near one.
std::vector<EmbeddedScanRow> embedded_scan(const OperatorSpec& op,
                                           const std::vector<double>& lambdas);

}  // namespace solspec
