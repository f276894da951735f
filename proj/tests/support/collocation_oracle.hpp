#pragma once

#include <vector>

namespace oracle {

/// Independent ground-state solver: damped Newton on the second-order
/// finite-difference collocation of  u'' = u - u^3/r^2  (u = r psi) with
/// u(0) = 0 and the decay-matching Robin condition u'(R) = -u(R).
/// Shares no code path with the shooting construction.
struct CollocationResult {
  double h = 0.0;
  double center_value = 0.0;            // psi(0) by even-series extrapolation
  std::vector<double> u;                // u at r_i = (i+1) h
  int newton_iterations = 0;
  double final_residual = 0.0;          // sup norm of the discrete system
};

CollocationResult solve_collocation(double r_max, double h);

/// Richardson-extrapolated center value over steps h and h/2 (second-order
/// scheme, so the h^2 error cancels).
double collocation_center_value(double r_max, double h);

}  // namespace oracle
