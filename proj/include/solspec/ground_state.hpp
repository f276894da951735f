#pragma once

#include <functional>
#include <string>

#include "solspec/grid.hpp"
#include "solspec/ode.hpp"

namespace solspec {

/// Sampled positive radial ground state of  -Q'' - (2/r)Q' + Q - Q^3 = 0,
/// together with its derivative, the fitted exponential tail and the
/// measured ODE residual.
struct QProfile {
  RadialGrid grid;
  std::vector<double> q;   // Q(r) at nodes
  std::vector<double> dq;  // Q'(r) at nodes
  double center_value = 0.0;  // Q(0)
  double decay_rate = 0.0;    // nu in Q ~ tail_amp * e^{-nu r} / r
  double tail_amp = 0.0;
  double residual_sup = 0.0;  // per-interval re-integration defect, sup norm
  double tol = 0.0;           // integrator tolerance used

  double r_max() const { return grid.r_max; }
};

struct GroundStateParams {
  double r_max = 30.0;
  double h = 0.01;       // node spacing
  double r_first = 1e-4;
  double ode_tol = 1e-11;
};

/// Shooting with node-count bisection on b = Q(0) in [1, 10], followed by a
/// two-sided matching pass (outward regular / inward decaying) so the tail is
/// clean all the way to R_max.
QProfile solve_ground_state(double bisect_tol = 1e-12,
                            const GroundStateParams& params = {});

struct QValue {
  double q = 0.0;
  double dq = 0.0;
  bool extrapolated = false;  // r > R_max, tail model used
};

/// Cubic Hermite interpolation between nodes; series below the first node;
/// fitted tail beyond R_max.
QValue q_at(const QProfile& profile, double r);

/// 4 pi is NOT included: returns  integral_0^inf f(Q, Q', r) r^2 dr  with an
/// analytic tail correction from the fitted decay.  Throws if the tail
/// contribution exceeds 1% of the truncated value (non-decaying integrand).
double q_quadrature(const QProfile& profile,
                    const std::function<double(double q, double dq, double r)>& f);

/// Versioned text cache, '#' header lines then "r,Q,Q'" rows, 17 significant
/// digits, ordered by r.  Round-trips bit-exactly.
void save_q_cache(const QProfile& profile, const std::string& path);
QProfile load_q_cache(const std::string& path);

/// Obtain the profile for (params, bisect_tol), loading from cache_path when
/// the file exists and matches, computing and saving otherwise.  Empty path
/// disables caching.
QProfile ground_state_cached(const std::string& cache_path,
                             double bisect_tol = 1e-12,
                             const GroundStateParams& params = {});

}  // namespace solspec
