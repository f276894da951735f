#include "solspec/resonance.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace solspec {

namespace {

// Cubic Hermite value/derivative of a stored solution between its nodes.
struct Interp {
  double u, du;
};

Interp hermite_at(const RadialSolution& sol, double r) {
  const auto& x = sol.grid.nodes;
  if (r <= x.front()) {
    // linear continuation through (u0, du0) at the origin
    return {sol.u0 + r * sol.du0, sol.du0};
  }
  auto it = std::lower_bound(x.begin(), x.end(), r);
  std::size_t j = static_cast<std::size_t>(it - x.begin());
  if (j >= x.size()) j = x.size() - 1;
  std::size_t i = j - 1;
  const double h = x[j] - x[i];
  const double t = (r - x[i]) / h;
  const double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
  const double h10 = t * (1 - t) * (1 - t);
  const double h01 = t * t * (3 - 2 * t);
  const double h11 = t * t * (t - 1);
  double u = h00 * sol.u[i] + h10 * h * sol.du[i] + h01 * sol.u[j] + h11 * h * sol.du[j];
  const double d00 = 6 * t * (t - 1) / h;
  const double d10 = (1 - t) * (1 - 3 * t);
  const double d01 = -6 * t * (t - 1) / h;
  const double d11 = t * (3 * t - 2);
  double du = d00 * sol.u[i] + d10 * sol.du[i] + d01 * sol.u[j] + d11 * sol.du[j];
  return {u, du};
}

// First interior zero located by node bracketing plus bisection on the
// interpolant; empty (negative) when the sign never changes.
double first_zero(const RadialSolution& sol) {
  const auto& u = sol.u;
  for (std::size_t i = 0; i + 1 < u.size(); ++i) {
    if (u[i] == 0.0) return sol.grid.nodes[i];
    if (u[i] * u[i + 1] < 0.0) {
      double lo = sol.grid.nodes[i], hi = sol.grid.nodes[i + 1];
      double flo = u[i];
      for (int it = 0; it < 60; ++it) {
        double mid = 0.5 * (lo + hi);
        double fm = hermite_at(sol, mid).u;
        if (fm == 0.0) return mid;
        if (fm * flo > 0.0) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      return 0.5 * (lo + hi);
    }
  }
  return -1.0;
}

int interior_zero_count(const RadialSolution& sol) {
  int count = 0;
  for (std::size_t i = 0; i + 1 < sol.u.size(); ++i)
    if (sol.u[i] != 0.0 && sol.u[i] * sol.u[i + 1] < 0.0) ++count;
  return count;
}

struct LinearFit {
  double slope, intercept, rms;
};

// Least-squares line over the stored nodes with r in [r_lo, r_hi].
LinearFit fit_tail(const RadialSolution& sol, double r_lo, double r_hi) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < sol.size(); ++i) {
    double r = sol.grid.nodes[i];
    if (r < r_lo || r > r_hi) continue;
    sx += r;
    sy += sol.u[i];
    sxx += r * r;
    sxy += r * sol.u[i];
    ++n;
  }
  if (n < 2) throw std::runtime_error("fit_tail: window holds fewer than two nodes");
  double det = n * sxx - sx * sx;
  LinearFit fit;
  fit.slope = (n * sxy - sx * sy) / det;
  fit.intercept = (sxx * sy - sx * sxy) / det;
  double ss = 0;
  for (std::size_t i = 0; i < sol.size(); ++i) {
    double r = sol.grid.nodes[i];
    if (r < r_lo || r > r_hi) continue;
    double d = sol.u[i] - (fit.slope * r + fit.intercept);
    ss += d * d;
  }
  fit.rms = std::sqrt(ss / n);
  return fit;
}

// Composite Simpson over samples f_0..f_m at spacing h (3/8 tail when m is odd).
double simpson(const std::vector<double>& f, double h, std::size_t m) {
  if (m < 3) {  // trapezoid fallback for degenerate prefixes
    double s = 0;
    for (std::size_t j = 0; j < m; ++j) s += 0.5 * (f[j] + f[j + 1]);
    return s * h;
  }
  std::size_t even_end = (m % 2 == 0) ? m : m - 3;
  double s = f[0] + f[even_end];
  for (std::size_t j = 1; j < even_end; ++j) s += (j % 2 ? 4.0 : 2.0) * f[j];
  s *= h / 3.0;
  if (m % 2 != 0)
    s += 3.0 * h / 8.0 * (f[m - 3] + 3 * f[m - 2] + 3 * f[m - 1] + f[m]);
  return s;
}

}  // namespace

RadialSolution threshold_solution(const QProfile& profile, double coupling,
                                  double eps, double h) {
  // Offsets above 1 arise from comparison grids scaled by 1 - lambda_beta;
  // the cap keeps e^{sqrt(eps) R} far below the overflow guard.
  if (eps < 0.0 || eps > 60.0)
    throw std::invalid_argument("threshold_solution: eps outside [0, 60]");
  if (coupling < 0.0)
    throw std::invalid_argument("threshold_solution: negative coupling");
  const QProfile* prof = &profile;
  Coefficient w = [prof, coupling, eps](double r) {
    QValue v = q_at(*prof, r);
    return eps - coupling * v.q * v.q;
  };
  RadialGrid grid = RadialGrid::uniform(h, profile.grid.r_max, h);
  return integrate(w, 0.0, -1.0, grid, 1e-12);
}

double resonance_tail_slope(const QProfile& profile, double coupling) {
  RadialSolution f0 = threshold_solution(profile, coupling, 0.0);
  const double rmax = profile.grid.r_max;
  return fit_tail(f0, 2.0 * rmax / 3.0, rmax).slope;
}

ResonanceResult resonance_verdict_coupling(const QProfile& profile, double coupling,
                                           double slope_threshold) {
  RadialSolution f0 = threshold_solution(profile, coupling, 0.0);
  const double rmax = profile.grid.r_max;
  LinearFit fit = fit_tail(f0, 2.0 * rmax / 3.0, rmax);

  ResonanceResult res;
  res.coupling = coupling;
  res.tail_slope = fit.slope;
  res.intercept = fit.intercept;
  res.fit_residual = fit.rms;

  const double fit_bound = 1e-6 * std::abs(fit.slope) * rmax;
  if (std::abs(fit.slope) > slope_threshold) {
    res.classification = (fit.rms < fit_bound) ? ResonanceClass::no_resonance
                                               : ResonanceClass::inconclusive;
  } else {
    res.classification = ResonanceClass::resonance_suspected;
  }

  // truncated weighted norms of psi = F/r: integral of F^2 (1+r)^-gamma dr
  const double h = f0.grid.nodes[1] - f0.grid.nodes[0];
  std::vector<std::vector<double>> fg(4, std::vector<double>(f0.size() + 1, 0.0));
  for (std::size_t i = 0; i < f0.size(); ++i) {
    double r = f0.grid.nodes[i];
    double f2 = f0.u[i] * f0.u[i];
    double wgt = 1.0;
    for (int g = 0; g < 4; ++g) {
      fg[g][i + 1] = f2 * wgt;
      wgt /= 1.0 + r;
    }
  }
  for (double frac : {0.25, 0.5, 1.0}) {
    WeightedNormRow row;
    row.r_cut = frac * rmax;
    auto m = static_cast<std::size_t>(std::lround(row.r_cut / h));
    m = std::min(m, f0.size());
    for (int g = 0; g < 4; ++g) row.norm[g] = simpson(fg[g], h, m);
    res.weighted_norms.push_back(row);
  }
  return res;
}

ResonanceResult resonance_verdict(const QProfile& profile, double beta,
                                  double slope_threshold) {
  return resonance_verdict_coupling(profile, coupling_coefficient(beta),
                                    slope_threshold);
}

double synthetic_resonant_scale(const QProfile& profile, double coupling) {
  double a_lo = 1.0;
  double s_lo = resonance_tail_slope(profile, a_lo * coupling);
  double a_hi = a_lo;
  double s_hi = s_lo;
  for (int i = 0; i < 100 && s_hi * s_lo > 0.0; ++i) {
    a_hi += 0.1;
    s_hi = resonance_tail_slope(profile, a_hi * coupling);
  }
  if (s_hi * s_lo > 0.0)
    throw std::runtime_error("synthetic_resonant_scale: no sign change found");
  for (int it = 0; it < 60 && a_hi - a_lo > 1e-12; ++it) {
    double mid = 0.5 * (a_lo + a_hi);
    double sm = resonance_tail_slope(profile, mid * coupling);
    if (sm == 0.0) return mid;
    if (sm * s_lo > 0.0) {
      a_lo = mid;
      s_lo = sm;
    } else {
      a_hi = mid;
    }
  }
  return 0.5 * (a_lo + a_hi);
}

SturmRecord sturm_record(const QProfile& profile, double beta,
                         const std::vector<double>& eps_grid) {
  const double c = coupling_coefficient(beta);
  RadialSolution g = threshold_solution(profile, 3.0, 0.0);
  RadialSolution f0 = threshold_solution(profile, c, 0.0);

  SturmRecord rec;
  rec.r_star = first_zero(g);
  rec.r_0 = first_zero(f0);
  rec.g_zero_count = interior_zero_count(g);
  if (rec.r_star < 0.0 || rec.r_0 < 0.0)
    throw std::runtime_error("sturm_record: expected zero not found");

  for (double eps : eps_grid) {
    RadialSolution fe = threshold_solution(profile, c, eps);
    double z = first_zero(fe);
    if (z < 0.0) throw std::runtime_error("sturm_record: expected zero not found");
    rec.eps.push_back(eps);
    rec.r_eps.push_back(z);
  }

  // min over r >= 1 of G_*(r)/r with G_*(r) = G(r + r_*)/G'(r_*)
  const double dg = hermite_at(g, rec.r_star).du;
  const double span = profile.grid.r_max - rec.r_star;
  double min_ratio = 1e300;
  for (double r = 1.0; r <= span; r += 1e-3)
    min_ratio = std::min(min_ratio, hermite_at(g, r + rec.r_star).u / dg / r);
  rec.shifted_minimum = min_ratio;

  rec.unique_zero_ok = rec.g_zero_count == 1;
  rec.ordering_ok = rec.r_star <= rec.r_0 + 1e-12;
  for (std::size_t i = 0; i < rec.r_eps.size(); ++i) {
    if (rec.r_eps[i] + 1e-12 < rec.r_0) rec.ordering_ok = false;
    if (i > 0 && rec.eps[i] > rec.eps[i - 1] && rec.r_eps[i] + 1e-12 < rec.r_eps[i - 1])
      rec.ordering_ok = false;
  }
  rec.pass = rec.unique_zero_ok && rec.ordering_ok && rec.shifted_minimum > 0.0;
  return rec;
}

ShiftedComparison shifted_comparison(const QProfile& profile, double beta, double eps) {
  const double c = coupling_coefficient(beta);
  RadialSolution fe = threshold_solution(profile, c, eps);
  RadialSolution g = threshold_solution(profile, 3.0, 0.0);

  ShiftedComparison out;
  out.eps = eps;
  out.r_eps = first_zero(fe);
  out.r_star = first_zero(g);
  if (out.r_eps < 0.0 || out.r_star < 0.0)
    throw std::runtime_error("shifted_comparison: expected zero not found");

  const double dfe = hermite_at(fe, out.r_eps).du;
  const double dg = hermite_at(g, out.r_star).du;
  const double rmax = profile.grid.r_max;
  const double span = rmax - std::max(out.r_eps, out.r_star);

  double min_gap = 1e300, min_ratio = 1e300;
  for (double r = 0.0; r <= span; r += 1e-3) {
    double fv = hermite_at(fe, r + out.r_eps).u / dfe;
    double gv = hermite_at(g, r + out.r_star).u / dg;
    min_gap = std::min(min_gap, fv - gv);
    if (r >= 1.0) min_ratio = std::min(min_ratio, gv / r);
  }
  out.min_gap = min_gap;
  out.min_ratio = min_ratio;
  out.pass = min_gap >= -1e-8 && min_ratio > 0.0;
  return out;
}

double sector_mu(int sector_index) {
  if (sector_index < 1)
    throw std::invalid_argument("sector_mu: index must be >= 1");
  int ell = static_cast<int>(std::floor(std::sqrt(static_cast<double>(sector_index)) + 1e-12));
  return static_cast<double>(ell) * (ell + 1);
}

NonradialIdentity nonradial_identity(const QProfile& profile, double beta,
                                     int sector_index, double start_value) {
  if (start_value <= 0.0)
    throw std::invalid_argument("nonradial_identity: start value must be positive");
  const double c = coupling_coefficient(beta);
  const double mu = sector_mu(sector_index);
  const int ell = static_cast<int>(std::lround(0.5 * (std::sqrt(1.0 + 4.0 * mu) - 1.0)));
  OperatorSpec op{c, ell, &profile};

  const double h = 1e-3;
  const double rmax = profile.grid.r_max;
  RadialGrid grid = RadialGrid::uniform(h, rmax, h);
  Coefficient w = op.weight(0.0);
  OriginStart s = origin_start(op.weight_smooth(0.0), ell, start_value, 1e-4);
  std::array<double, 2> y = {s.u, s.du};
  Rhs2 f = [&w](double r, double u, double) { return w(r) * u; };
  rk45_advance(f, s.r_first, grid.nodes.front(), y, 1e-12);
  RadialSolution psi = integrate_from_first_node(w, y[0], y[1], grid, 1e-12);

  NonradialIdentity out;
  out.sector_index = sector_index;
  out.mu = mu;
  double z = first_zero(psi);
  out.rho_is_cutoff = z < 0.0;
  out.rho = out.rho_is_cutoff ? rmax : z;

  Interp at_rho = hermite_at(psi, out.rho);
  QValue qv = q_at(profile, out.rho);
  const double q2nd = qv.q - qv.q * qv.q * qv.q - 2.0 * qv.dq / out.rho;
  out.term_boundary_slope = (out.rho * at_rho.du - at_rho.u) * qv.dq;
  out.term_boundary_value = -out.rho * at_rho.u * q2nd;

  // integrands sampled at r_j = j h (zero limits at the origin)
  auto m = static_cast<std::size_t>(std::lround(out.rho / h));
  m = std::min(m, psi.size());
  std::vector<double> f1(m + 1, 0.0), f2(m + 1, 0.0);
  for (std::size_t j = 1; j <= m; ++j) {
    double r = psi.grid.nodes[j - 1];
    QValue v = q_at(profile, r);
    double p = psi.u[j - 1] / r;  // psi itself; stored values are u = r psi
    f1[j] = v.dq * p;
    f2[j] = v.q * v.q * v.dq * p * r * r;
  }
  out.term_interior = (2.0 - mu) * simpson(f1, h, m);
  out.term_coupling = -4.0 * beta / (1.0 + beta) * simpson(f2, h, m);

  const double sum = out.term_boundary_slope + out.term_interior +
                     out.term_coupling + out.term_boundary_value;
  const double scale = std::max({std::abs(out.term_boundary_slope),
                                 std::abs(out.term_interior),
                                 std::abs(out.term_coupling),
                                 std::abs(out.term_boundary_value)});
  out.residual = std::abs(sum) / (scale > 0.0 ? scale : 1.0);
  out.sign_term1_ok = out.term_boundary_slope >= 0.0;
  out.sign_term2_ok = out.term_interior >= 0.0;
  out.sign_term3_ok = beta > 0.0 ? out.term_coupling > 0.0 : out.term_coupling >= 0.0;
  return out;
}

}  // namespace solspec
