#include "solspec/ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace solspec {

namespace {

// Dormand-Prince 5(4) coefficients.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// 4th-order weights (for the error estimate).
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

using Vec2 = std::array<double, 2>;

inline Vec2 deriv(const Rhs2& f, double r, const Vec2& y) {
  return {y[1], f(r, y[0], y[1])};
}

// Advance from ra to rb, observer called after each accepted step and may
// rescale the state (used for overflow-free node counting).  Returns false on
// overflow.
template <typename Observer>
bool step_loop(const Rhs2& f, double ra, double rb, Vec2& y, double tol,
               double max_step, double* r_stop, Observer&& observer) {
  const double dir = (rb >= ra) ? 1.0 : -1.0;
  const double span = std::abs(rb - ra);
  if (span == 0.0) return true;
  double r = ra;
  double h = dir * std::min({1e-3, span, max_step});
  Vec2 k1 = deriv(f, r, y);

  const double atol = 1e-300;
  int rejects_in_a_row = 0;
  while (dir * (rb - r) > 0.0) {
    if (std::abs(h) > max_step) h = dir * max_step;
    if (dir * (r + h - rb) > 0.0) h = rb - r;

    Vec2 k2, k3, k4, k5, k6, k7, yt, y5;
    auto stage = [&](double c, const Vec2& incr) {
      yt = {y[0] + h * incr[0], y[1] + h * incr[1]};
      return deriv(f, r + c * h, yt);
    };
    k2 = stage(c2, {a21 * k1[0], a21 * k1[1]});
    k3 = stage(c3, {a31 * k1[0] + a32 * k2[0], a31 * k1[1] + a32 * k2[1]});
    k4 = stage(c4, {a41 * k1[0] + a42 * k2[0] + a43 * k3[0],
                    a41 * k1[1] + a42 * k2[1] + a43 * k3[1]});
    k5 = stage(c5, {a51 * k1[0] + a52 * k2[0] + a53 * k3[0] + a54 * k4[0],
                    a51 * k1[1] + a52 * k2[1] + a53 * k3[1] + a54 * k4[1]});
    k6 = stage(1.0, {a61 * k1[0] + a62 * k2[0] + a63 * k3[0] + a64 * k4[0] + a65 * k5[0],
                     a61 * k1[1] + a62 * k2[1] + a63 * k3[1] + a64 * k4[1] + a65 * k5[1]});
    for (int i = 0; i < 2; ++i)
      y5[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    k7 = deriv(f, r + h, y5);

    double err = 0.0;
    for (int i = 0; i < 2; ++i) {
      double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                       e6 * k6[i] + e7 * k7[i]);
      double sc = atol + tol * std::max(std::abs(y[i]), std::abs(y5[i]));
      err = std::max(err, std::abs(ei) / sc);
    }

    if (err <= 1.0 || std::abs(h) < 1e-14 * std::max(1.0, std::abs(r))) {
      r += h;
      y = y5;
      k1 = k7;  // FSAL
      rejects_in_a_row = 0;
      if (!std::isfinite(y[0]) || !std::isfinite(y[1]) ||
          std::abs(y[0]) > kOverflowGuard || std::abs(y[1]) > kOverflowGuard) {
        if (r_stop) *r_stop = r;
        return false;
      }
      if (!observer(r, y)) k1 = deriv(f, r, y);  // state was rescaled
    } else {
      if (++rejects_in_a_row > 200) throw std::runtime_error("rk45: step control stalled");
    }
    double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
    h *= std::clamp(fac, 0.2, 5.0);
  }
  if (r_stop) *r_stop = r;
  return true;
}

bool identity_observer(double, const Vec2&) { return true; }

Rhs2 linear_rhs(const Coefficient& w) {
  return [&w](double r, double u, double) { return w(r) * u; };
}

RadialSolution sample_forward(const Coefficient& w, double r_start, Vec2 y,
                              std::size_t start_index, const RadialGrid& grid,
                              double tol, double u0, double du0) {
  grid.validate();
  if (tol < 1e-13 || tol > 1e-6)
    throw std::invalid_argument("integrate: tol out of [1e-13, 1e-6]");
  RadialSolution sol;
  sol.grid = grid;
  sol.u0 = u0;
  sol.du0 = du0;
  sol.u.reserve(grid.size());
  sol.du.reserve(grid.size());
  Rhs2 f = linear_rhs(w);
  double r = r_start;
  if (start_index == 1) {
    sol.u.push_back(y[0]);
    sol.du.push_back(y[1]);
    r = grid.nodes[0];
  }
  for (std::size_t i = start_index; i < grid.size(); ++i) {
    double stop = r;
    if (!step_loop(f, r, grid.nodes[i], y, tol,
                   std::numeric_limits<double>::infinity(), &stop,
                   identity_observer)) {
      sol.blew_up = true;
      sol.blowup_radius = stop;
      return sol;
    }
    r = grid.nodes[i];
    sol.u.push_back(y[0]);
    sol.du.push_back(y[1]);
  }
  return sol;
}

}  // namespace

bool rk45_advance(const Rhs2& f, double ra, double rb, std::array<double, 2>& y,
                  double tol, double* r_stop) {
  return step_loop(f, ra, rb, y, tol, std::numeric_limits<double>::infinity(),
                   r_stop, identity_observer);
}

RadialSolution integrate(const Coefficient& w, double u0, double du0,
                         const RadialGrid& grid, double tol) {
  Vec2 y = {u0, du0};
  return sample_forward(w, 0.0, y, 0, grid, tol, u0, du0);
}

RadialSolution integrate_from_first_node(const Coefficient& w, double u_first,
                                         double du_first, const RadialGrid& grid,
                                         double tol) {
  Vec2 y = {u_first, du_first};
  return sample_forward(w, grid.nodes[0], y, 1, grid, tol, 0.0, du_first);
}

RadialSolution integrate_inward(const Coefficient& w, double u_end,
                                double du_end, const RadialGrid& grid,
                                double tol) {
  grid.validate();
  RadialSolution sol;
  sol.grid = grid;
  sol.u.assign(grid.size(), 0.0);
  sol.du.assign(grid.size(), 0.0);
  Rhs2 f = linear_rhs(w);
  Vec2 y = {u_end, du_end};
  double r = grid.nodes.back();
  sol.u.back() = y[0];
  sol.du.back() = y[1];
  for (std::size_t i = grid.size() - 1; i-- > 0;) {
    double stop = r;
    if (!step_loop(f, r, grid.nodes[i], y, tol,
                   std::numeric_limits<double>::infinity(), &stop,
                   identity_observer)) {
      sol.blew_up = true;
      sol.blowup_radius = stop;
      return sol;
    }
    r = grid.nodes[i];
    sol.u[i] = y[0];
    sol.du[i] = y[1];
  }
  return sol;
}

double reintegration_defect(const Coefficient& w, const RadialSolution& sol,
                            double tol) {
  Rhs2 f = linear_rhs(w);
  double worst = 0.0;
  for (std::size_t i = 0; i + 1 < sol.size(); ++i) {
    Vec2 y = {sol.u[i], sol.du[i]};
    if (!step_loop(f, sol.grid.nodes[i], sol.grid.nodes[i + 1], y, tol,
                   std::numeric_limits<double>::infinity(), nullptr,
                   identity_observer))
      return std::numeric_limits<double>::infinity();
    double scale = std::max({std::abs(sol.u[i]), std::abs(sol.u[i + 1]),
                             std::abs(sol.du[i]), std::abs(sol.du[i + 1]), 1e-30});
    double d = std::max(std::abs(y[0] - sol.u[i + 1]), std::abs(y[1] - sol.du[i + 1]));
    worst = std::max(worst, d / scale);
  }
  return worst;
}

OriginStart origin_start(const Coefficient& w_smooth, int ell, double psi0_scale,
                         double first_node) {
  if (first_node > 0.1)
    throw std::invalid_argument("origin_start: first node too large for series validity");
  if (ell < 0) throw std::invalid_argument("origin_start: ell must be >= 0");
  const int p = ell + 1;
  // w is even and smooth at 0; probe the limit and curvature numerically.
  const double d = 1e-2;
  const double w0 = w_smooth(1e-8);
  const double w2 = 2.0 * (w_smooth(d) - w0) / (d * d);  // w''(0) + O(d^2)
  const double A = w0 / (4.0 * p + 2.0);
  const double B = (A * w0 + 0.5 * w2) / (8.0 * p + 12.0);
  const double r = first_node;
  const double rp = std::pow(r, p);
  OriginStart s;
  s.r_first = r;
  s.u = psi0_scale * rp * (1.0 + A * r * r + B * r * r * r * r);
  s.du = psi0_scale * (p * rp / r * (1.0 + A * r * r + B * r * r * r * r) +
                       rp * (2.0 * A * r + 4.0 * B * r * r * r));
  return s;
}

int count_sign_changes(const Coefficient& w_smooth, int ell, double r_max,
                       double tol) {
  const double mu = static_cast<double>(ell) * (ell + 1);
  Coefficient w_full = [&](double r) { return w_smooth(r) + mu / (r * r); };
  OriginStart s = origin_start(w_smooth, ell, 1.0, 1e-4);
  Vec2 y = {s.u, s.du};
  Rhs2 f = linear_rhs(w_full);
  int sign = 1;  // regular solution starts positive
  int changes = 0;
  auto observer = [&](double, Vec2& st) {
    double m = std::max(std::abs(st[0]), std::abs(st[1]));
    if (st[0] != 0.0) {
      int s_now = (st[0] > 0.0) ? 1 : -1;
      if (s_now != sign) {
        ++changes;
        sign = s_now;
      }
    }
    if (m > 1e250) {
      st[0] *= 1e-250;
      st[1] *= 1e-250;
      return false;  // rescaled
    }
    return true;
  };
  step_loop(f, s.r_first, r_max, y, tol, 0.05, nullptr, observer);
  return changes;
}

}  // namespace solspec
