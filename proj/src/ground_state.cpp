#include "solspec/ground_state.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace solspec {

namespace {

using Vec2 = std::array<double, 2>;

// u = r*psi of the ground-state equation:  u'' = u - u^3 / r^2.
double soliton_rhs(double r, double u, double /*du*/) {
  return u - u * u * u / (r * r);
}

// Series start at small r for psi(0) = b:
//   psi = b + c2 r^2 + c4 r^4,  c2 = (b - b^3)/6,  c4 = c2 (1 - 3 b^2)/20.
Vec2 series_start(double b, double r) {
  const double c2 = (b - b * b * b) / 6.0;
  const double c4 = c2 * (1.0 - 3.0 * b * b) / 20.0;
  const double psi = b + c2 * r * r + c4 * r * r * r * r;
  const double dpsi = 2.0 * c2 * r + 4.0 * c4 * r * r * r;
  return {r * psi, psi + r * dpsi};
}

// true if the shot from psi(0)=b crosses zero before r_max (b too large).
bool shot_crosses_zero(double b, double r_first, double r_max, double tol) {
  Vec2 y = series_start(b, r_first);
  bool crossed = false;
  bool du_was_negative = false;
  double r = r_first;
  while (r < r_max && !crossed) {
    double next = std::min(r + 1.0, r_max);
    double stop = r;
    bool ok = rk45_advance(soliton_rhs, r, next, y, tol, &stop);
    if (!ok) return y[0] <= 0.0;  // overflowed; sign tells which side
    r = next;
    if (y[0] <= 0.0) crossed = true;
    if (y[1] < 0.0) du_was_negative = true;
    if (du_was_negative && y[1] > 0.0 && y[0] > 1e-6) return false;  // turned back up
  }
  return crossed;
}

struct MatchState {
  double u, du;
};

MatchState outward_at(double b, double r_first, double r_match, double tol) {
  Vec2 y = series_start(b, r_first);
  if (!rk45_advance(soliton_rhs, r_first, r_match, y, tol))
    throw std::runtime_error("ground state: outward shot overflowed");
  return {y[0], y[1]};
}

MatchState inward_at(double a, double r_max, double r_match, double tol) {
  Vec2 y = {a * std::exp(-r_max), -a * std::exp(-r_max)};
  if (!rk45_advance(soliton_rhs, r_max, r_match, y, tol))
    throw std::runtime_error("ground state: inward shot overflowed");
  return {y[0], y[1]};
}

}  // namespace

QProfile solve_ground_state(double bisect_tol, const GroundStateParams& params) {
  if (bisect_tol < 1e-12) bisect_tol = 1e-12;
  // Construction runs a notch tighter than the requested tolerance: the
  // matching defect at the glue node is what residual_sup sees.
  const double tol = std::min(params.ode_tol, 1e-12);
  const double r0 = params.r_first;
  const double rmax = params.r_max;

  // Node-count bisection on b = Q(0).
  double b_lo = 1.0, b_hi = 10.0;
  if (shot_crosses_zero(b_lo, r0, rmax, tol) || !shot_crosses_zero(b_hi, r0, rmax, tol))
    throw std::runtime_error("ground state: bisection bracket [1,10] invalid");
  for (int it = 0; it < 200 && (b_hi - b_lo) > bisect_tol * 0.5; ++it) {
    double mid = 0.5 * (b_lo + b_hi);
    if (mid == b_lo || mid == b_hi) break;
    (shot_crosses_zero(mid, r0, rmax, tol) ? b_hi : b_lo) = mid;
  }
  double b = 0.5 * (b_lo + b_hi);

  // Two-sided matching: polish (b, a) so the regular solution from the origin
  // and the decaying solution from R_max meet smoothly.  Keeps the tail clean
  // where pure outward shooting is contaminated by the growing mode.
  const double r_match = std::min(5.0, 0.5 * rmax);
  double a = outward_at(b, r0, r_match, tol).u * std::exp(r_match);
  for (int it = 0; it < 20; ++it) {
    MatchState o = outward_at(b, r0, r_match, tol);
    MatchState in = inward_at(a, rmax, r_match, tol);
    double f0 = o.u - in.u, f1 = o.du - in.du;
    double scale = std::abs(o.u) + std::abs(o.du);
    if (std::hypot(f0, f1) < 1e-10 * scale) break;
    const double db = 1e-10, da = 1e-8 * a;
    MatchState ob = outward_at(b + db, r0, r_match, tol);
    MatchState ia = inward_at(a + da, rmax, r_match, tol);
    double j00 = (ob.u - o.u) / db, j01 = -(ia.u - in.u) / da;
    double j10 = (ob.du - o.du) / db, j11 = -(ia.du - in.du) / da;
    double det = j00 * j11 - j01 * j10;
    if (det == 0.0) break;
    b -= (f0 * j11 - f1 * j01) / det;
    a -= (j00 * f1 - j10 * f0) / det;
  }

  // Assemble the profile on the grid: outward up to the match node, inward past it.
  QProfile prof;
  prof.grid = RadialGrid::uniform(r0, rmax, params.h);
  prof.tol = params.ode_tol;
  prof.center_value = b;
  const auto& nodes = prof.grid.nodes;
  std::size_t m = 0;
  while (m + 1 < nodes.size() && nodes[m] < r_match) ++m;

  std::vector<double> u(nodes.size()), du(nodes.size());
  {
    Vec2 y = series_start(b, r0);
    u[0] = y[0];
    du[0] = y[1];
    double r = r0;
    for (std::size_t i = 1; i <= m; ++i) {
      if (!rk45_advance(soliton_rhs, r, nodes[i], y, tol))
        throw std::runtime_error("ground state: outward assembly overflowed");
      r = nodes[i];
      u[i] = y[0];
      du[i] = y[1];
    }
  }
  {
    Vec2 y = {a * std::exp(-rmax), -a * std::exp(-rmax)};
    double r = rmax;
    u.back() = y[0];
    du.back() = y[1];
    for (std::size_t i = nodes.size() - 1; i-- > m;) {
      if (!rk45_advance(soliton_rhs, r, nodes[i], y, tol))
        throw std::runtime_error("ground state: inward assembly overflowed");
      r = nodes[i];
      if (i > m) {
        u[i] = y[0];
        du[i] = y[1];
      }
    }
  }

  prof.q.resize(nodes.size());
  prof.dq.resize(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    double r = nodes[i];
    prof.q[i] = u[i] / r;
    prof.dq[i] = du[i] / r - u[i] / (r * r);
    if (prof.q[i] <= 0.0)
      throw std::runtime_error("ground state: profile not positive");
  }

  // Tail fit on the last decade of radii, linear regression of log(rQ).
  {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (nodes[i] < rmax / 10.0) continue;
      double x = nodes[i], y = std::log(u[i]);
      sx += x; sy += y; sxx += x * x; sxy += x * y;
      ++n;
    }
    double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    double inter = (sy - slope * sx) / n;
    prof.decay_rate = -slope;
    prof.tail_amp = std::exp(inter);
  }

  // ODE residual: per-interval re-integration defect of the stored (u, u').
  {
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
      Vec2 y = {u[i], du[i]};
      rk45_advance(soliton_rhs, nodes[i], nodes[i + 1], y, 1e-13);
      double scale = std::max({std::abs(u[i]), std::abs(du[i]), 1e-30});
      double d = std::max(std::abs(y[0] - u[i + 1]), std::abs(y[1] - du[i + 1]));
      worst = std::max(worst, d / scale);
    }
    prof.residual_sup = worst;
  }
  return prof;
}

QValue q_at(const QProfile& prof, double r) {
  const auto& nodes = prof.grid.nodes;
  if (r < 0.0) throw std::invalid_argument("q_at: negative radius");
  if (r == 0.0) return {prof.center_value, 0.0, false};
  if (r > prof.grid.r_max) {
    double e = prof.tail_amp * std::exp(-prof.decay_rate * r);
    return {e / r, -e * (prof.decay_rate * r + 1.0) / (r * r), true};
  }
  if (r <= nodes.front()) {
    double b = prof.center_value;
    double c2 = (b - b * b * b) / 6.0;
    return {b + c2 * r * r, 2.0 * c2 * r, false};
  }
  auto it = std::lower_bound(nodes.begin(), nodes.end(), r);
  std::size_t j = static_cast<std::size_t>(it - nodes.begin());
  if (nodes[j] == r) return {prof.q[j], prof.dq[j], false};
  std::size_t i = j - 1;
  double h = nodes[j] - nodes[i];
  double t = (r - nodes[i]) / h;
  double t2 = t * t, t3 = t2 * t;
  double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
  double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
  double q = h00 * prof.q[i] + h * h10 * prof.dq[i] + h01 * prof.q[j] + h * h11 * prof.dq[j];
  double dq = ((6 * t2 - 6 * t) * prof.q[i] + h * (3 * t2 - 4 * t + 1) * prof.dq[i] +
               (6 * t - 6 * t2) * prof.q[j] + h * (3 * t2 - 2 * t) * prof.dq[j]) / h;
  return {q, dq, false};
}

double q_quadrature(const QProfile& prof,
                    const std::function<double(double, double, double)>& f) {
  const double rmax = prof.grid.r_max;
  // Simpson on [0, rmax] via the interpolant.
  std::size_t n = static_cast<std::size_t>(rmax / 1e-3);
  if (n % 2) ++n;
  const double hq = rmax / static_cast<double>(n);
  auto g = [&](double r) {
    QValue v = q_at(prof, r);
    return f(v.q, v.dq, r) * r * r;
  };
  double acc = g(0.0) + g(rmax);
  for (std::size_t j = 1; j < n; ++j) acc += (j % 2 ? 4.0 : 2.0) * g(hq * j);
  double trunc = acc * hq / 3.0;

  // Tail correction from the fitted decay model.
  const double span = 60.0 / prof.decay_rate;
  const std::size_t nt = 6000;
  const double ht = span / nt;
  auto gt = [&](double r) {
    double e = prof.tail_amp * std::exp(-prof.decay_rate * r);
    double qt = e / r;
    double dqt = -e * (prof.decay_rate * r + 1.0) / (r * r);
    return f(qt, dqt, r) * r * r;
  };
  double acct = gt(rmax) + gt(rmax + span);
  for (std::size_t j = 1; j < nt; ++j) acct += (j % 2 ? 4.0 : 2.0) * gt(rmax + ht * j);
  double tail = acct * ht / 3.0;

  if (std::abs(tail) > 0.01 * std::abs(trunc))
    throw std::domain_error("q_quadrature: integrand does not decay (tail > 1%)");
  return trunc + tail;
}

namespace {
std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}
}  // namespace

void save_q_cache(const QProfile& prof, const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // binary: LF endings everywhere
  if (!out) throw std::runtime_error("save_q_cache: cannot open " + path);
  out << "# solspec Q profile v1\n";
  out << "# tol = " << fmt17(prof.tol) << "\n";
  out << "# r_max = " << fmt17(prof.grid.r_max) << "\n";
  out << "# center_value = " << fmt17(prof.center_value) << "\n";
  out << "# decay_rate = " << fmt17(prof.decay_rate) << "\n";
  out << "# tail_amp = " << fmt17(prof.tail_amp) << "\n";
  out << "# residual_sup = " << fmt17(prof.residual_sup) << "\n";
  for (std::size_t i = 0; i < prof.grid.size(); ++i)
    out << fmt17(prof.grid.nodes[i]) << ',' << fmt17(prof.q[i]) << ','
        << fmt17(prof.dq[i]) << "\n";
}

QProfile load_q_cache(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_q_cache: cannot open " + path);
  QProfile prof;
  std::string line;
  bool versioned = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line.find("solspec Q profile v1") != std::string::npos) versioned = true;
      auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      std::string key = line.substr(1, eq - 1);
      key.erase(std::remove(key.begin(), key.end(), ' '), key.end());
      double val = std::strtod(line.c_str() + eq + 1, nullptr);
      if (key == "tol") prof.tol = val;
      else if (key == "center_value") prof.center_value = val;
      else if (key == "decay_rate") prof.decay_rate = val;
      else if (key == "tail_amp") prof.tail_amp = val;
      else if (key == "residual_sup") prof.residual_sup = val;
      continue;
    }
    double r, q, dq;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &r, &q, &dq) != 3)
      throw std::runtime_error("load_q_cache: malformed row: " + line);
    prof.grid.nodes.push_back(r);
    prof.q.push_back(q);
    prof.dq.push_back(dq);
  }
  if (!versioned) throw std::runtime_error("load_q_cache: missing version header");
  if (prof.grid.nodes.empty()) throw std::runtime_error("load_q_cache: no data rows");
  prof.grid.r_max = prof.grid.nodes.back();
  prof.grid.validate();
  return prof;
}

QProfile ground_state_cached(const std::string& cache_path, double bisect_tol,
                             const GroundStateParams& params) {
  if (!cache_path.empty() && std::filesystem::exists(cache_path)) {
    QProfile prof = load_q_cache(cache_path);
    if (std::abs(prof.grid.r_max - params.r_max) < 1e-12 && prof.tol == params.ode_tol)
      return prof;
  }
  QProfile prof = solve_ground_state(bisect_tol, params);
  if (!cache_path.empty()) save_q_cache(prof, cache_path);
  return prof;
}

}  // namespace solspec
