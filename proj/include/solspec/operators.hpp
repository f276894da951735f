#pragma once

#include <utility>
#include <vector>

#include "solspec/ground_state.hpp"
#include "solspec/ode.hpp"

namespace solspec {

/// Scalar radial Schrodinger operator  -Laplacian + 1 - c Q^2  restricted to
/// the spherical-harmonic sector with angular eigenvalue mu = ell(ell+1).
struct OperatorSpec {
  double coupling = 0.0;  // c, coefficient of Q^2
  int ell = 0;
  const QProfile* profile = nullptr;

  double mu() const { return static_cast<double>(ell) * (ell + 1); }

  /// Coefficient of  u'' = W(r) u  for the reduced variable u = r psi at
  /// spectral parameter lambda:  W = (1 - lambda) + mu/r^2 - c Q^2.
  Coefficient weight(double lambda) const;

  /// Regular part of the weight (without the centrifugal term), for series
  /// starts and node counting.
  Coefficient weight_smooth(double lambda) const;
};

/// c = (3 - beta)/(1 + beta).  Domain beta >= 0.
double coupling_coefficient(double beta);

/// Inverse map, c in (0, 3].
double effective_beta(double c);

/// 2x2 operators of the coupled problem.  All entries share the same
/// -Laplacian + 1 part; only the Q^2 coefficients differ.
enum class MatrixKind { coupled, diagonal, standard_solution, generalized };

struct MatrixOperatorSpec {
  MatrixKind kind = MatrixKind::diagonal;
  double diag1 = 0.0;     // coefficient of Q^2 in entry (1,1)
  double diag2 = 0.0;     // entry (2,2)
  double offdiag = 0.0;   // entries (1,2) = (2,1)

  static MatrixOperatorSpec coupled_L(double beta);        // full coupled linearization
  static MatrixOperatorSpec diagonal_D(double beta);       // diag(3, (3-beta)/(1+beta))
  static MatrixOperatorSpec standard_L1(double beta);      // diag(3, beta)
};

/// Finite-difference residual of  -u'' + (1 + mu/r^2 - c Q^2) u - lambda u
/// on the profile grid (u in the reduced r*psi variable).  O(h^2).
/// End values of the returned vector are zero (no one-sided stencils).
std::vector<double> apply_radial(const OperatorSpec& op, const std::vector<double>& u,
                                 double lambda);

/// The isometry W: (h1, h2) -> ((h1+h2)/sqrt2, (h1-h2)/sqrt2), componentwise
/// on equal-length samples.
std::pair<std::vector<double>, std::vector<double>> w_transform(
    const std::vector<double>& h1, const std::vector<double>& h2);

/// Max pointwise discrepancy of W o L o W (test) against D (test) on the
/// profile grid, both applied with the same finite-difference Laplacian.
double conjugation_check(double beta, const std::vector<double>& t1,
                         const std::vector<double>& t2, const QProfile& profile);

/// Reduction of the generalized two-component system: k, l solve
/// k mu1 + l beta = 1, k beta + l mu2 = 1; eigen-couplings are the
/// eigenvalues of the 2x2 Q^2-coefficient matrix of the linearization at
/// (sqrt(k) Q, sqrt(l) Q), computed numerically.
struct GeneralReduction {
  double k = 0.0, l = 0.0;
  bool positive = true;            // k > 0 and l > 0
  double eigen_coupling_lo = 0.0;  // smaller eigenvalue
  double eigen_coupling_hi = 0.0;
  double reported_closed_form = 0.0;  // 3(mu1-beta)(mu2-beta)/(mu1 mu2 - beta^2)
  double closed_form_discrepancy = 0.0;  // |closed form - nearest eigen-coupling|
};

GeneralReduction general_reduction(double mu1, double mu2, double beta);

}  // namespace solspec
