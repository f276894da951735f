#pragma once

#include <array>
#include <functional>
#include <optional>

#include "solspec/grid.hpp"

namespace solspec {

/// Coefficient W(r) of a linear radial equation u'' = W(r) u.
using Coefficient = std::function<double(double)>;

/// General second-order right hand side: u'' = f(r, u, u').
using Rhs2 = std::function<double(double, double, double)>;

inline constexpr double kOverflowGuard = 1e300;
inline constexpr double kDefaultTol = 1e-11;

/// Integrate u'' = W(r) u from r = 0 with initial data (u0, du0),
/// sampling (u, u') at every grid node.  W must be continuous on (0, R_max];
/// it is never evaluated at r = 0 exactly (the first micro-step uses the
/// limit from the first trial evaluation point).
///
/// Overflow of |u| past 1e300 is reported through blew_up/blowup_radius;
/// values up to the last valid node are kept.
RadialSolution integrate(const Coefficient& w, double u0, double du0,
                         const RadialGrid& grid, double tol = kDefaultTol);

/// Same, but starting from the first grid node with data (u_first, du_first)
/// (used after a Frobenius start when W is singular at the origin).
RadialSolution integrate_from_first_node(const Coefficient& w, double u_first,
                                         double du_first, const RadialGrid& grid,
                                         double tol = kDefaultTol);

/// Integrate u'' = W(r) u inward from R_max with data (u_end, du_end),
/// sampling at every grid node.  Stable direction for decaying solutions.
RadialSolution integrate_inward(const Coefficient& w, double u_end,
                                double du_end, const RadialGrid& grid,
                                double tol = kDefaultTol);

/// Low-level driver: advance (u, u') of u'' = f(r, u, u') from ra to rb
/// (either direction) with an embedded Dormand-Prince 5(4) pair.
/// Returns false on overflow, with y holding the last accepted state and
/// r_stop the radius it was accepted at.
bool rk45_advance(const Rhs2& f, double ra, double rb, std::array<double, 2>& y,
                  double tol, double* r_stop = nullptr);

/// One high-accuracy re-integration of each grid interval, measuring how far
/// the stored (u, u') drift from the locally exact flow.  Sup over intervals
/// of the defect relative to local solution magnitude.
double reintegration_defect(const Coefficient& w, const RadialSolution& sol,
                            double tol = 1e-13);

/// Regularized start data for u = r psi at the first grid node.
struct OriginStart {
  double r_first = 0.0;
  double u = 0.0;
  double du = 0.0;
};

/// Series start for u'' = (w(r) + mu/r^2) u with mu = ell(ell+1) and u ~ r^(ell+1).
/// `w_smooth` is the regular part (epsilon - V(r)); it must be smooth and even
/// at r = 0.  `psi0_scale` fixes the normalization: for ell = 0 it is psi(0),
/// for ell >= 1 the coefficient of r^ell in psi.
/// Throws if first_node > 0.1 (series validity).
OriginStart origin_start(const Coefficient& w_smooth, int ell, double psi0_scale,
                         double first_node);

/// Count sign changes of the regular solution of u'' = (w + mu/r^2) u on
/// (0, r_max), with periodic renormalization so growth cannot overflow.
int count_sign_changes(const Coefficient& w_smooth, int ell, double r_max,
                       double tol = 1e-10);

}  // namespace solspec
