#pragma once

#include "solspec/operators.hpp"

namespace solspec {

/// Radial candidate pair for the coupled cubic system.  All in-scope
/// candidates are scalar multiples of the ground state, so the pair carries
/// its two multipliers alongside the sampled profiles; quadrature checks use
/// the multipliers with the profile interpolant (no sampling error), while
/// finite-difference residuals use the samples.
struct CandidatePair {
  const QProfile* profile = nullptr;
  double beta = 0.0;
  double scale1 = 0.0, scale2 = 0.0;  // pair = (scale1 Q, scale2 Q)
  std::vector<double> u1, u2;         // sampled psi-variable profiles

  static CandidatePair scaled(const QProfile& prof, double beta, double s1, double s2);
  /// Minimizer candidate (sqrt(1/(1+beta)) Q, sqrt(1/(1+beta)) Q).
  static CandidatePair symmetric(const QProfile& prof, double beta);
  /// Semitrivial solution (Q, 0).
  static CandidatePair single(const QProfile& prof, double beta);
  static CandidatePair zero(const QProfile& prof, double beta);
  /// Solution (sqrt(2/(1+beta)) Q, 0) of the rotated system.
  static CandidatePair transformed(const QProfile& prof, double beta);
};

struct PairResidual {
  double res1 = 0.0, res2 = 0.0;  // sup-norm per equation
};

/// Finite-difference residual of the coupled system
/// -Lap u1 + u1 - u1^3 - beta u1 u2^2 = 0 (and symmetrically) at the pair.
PairResidual system_residual(const CandidatePair& pair);

enum class NehariSet { summed, componentwise };

/// Relative constraint residuals: one value for the summed set, two for the
/// componentwise set.  Throws domain_error on a zero pair for the
/// componentwise set (both components must be nonzero).
std::vector<double> nehari_membership(const CandidatePair& pair, NehariSet which);

/// Energy functional value (gradient + mass minus quartic interaction).
double energy(const CandidatePair& pair);

/// Residual of the rotated system at its explicit solution
/// (sqrt(2/(1+beta)) Q, 0).
PairResidual transformed_residual(const QProfile& prof, double beta);

/// Q^2-coefficient functions of the linearized (Jacobian) operator at the
/// pair: the linearization is -Lap + 1 - (coefficient) Q^2 entrywise.
struct LinearizationMatrix {
  double diag1 = 0.0, diag2 = 0.0, offdiag = 0.0;
};

LinearizationMatrix linearization_matrix(const CandidatePair& pair);

}  // namespace solspec
