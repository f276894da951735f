#include "solspec/system_checks.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

namespace solspec {

namespace {

std::vector<double> sampled_multiple(const QProfile& prof, double s) {
  std::vector<double> v(prof.q.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = s * prof.q[i];
  return v;
}

// Sup-norm finite-difference residual of  -Lap psi + psi - N(psi1, psi2) = 0
// in the u = r psi variable (removes the first-derivative term).
double fd_residual(const QProfile& prof, const std::vector<double>& p1,
                   const std::vector<double>& p2,
                   const std::function<double(double, double)>& nonlinearity) {
  const auto& r = prof.grid.nodes;
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < r.size(); ++i) {
    double hl = r[i] - r[i - 1], hr = r[i + 1] - r[i];
    double vm = r[i - 1] * p1[i - 1], v0 = r[i] * p1[i], vp = r[i + 1] * p1[i + 1];
    double d2 = 2.0 * ((vp - v0) / hr - (v0 - vm) / hl) / (hl + hr);
    double res = -d2 + v0 - nonlinearity(p1[i], p2[i]) * r[i];
    worst = std::max(worst, std::abs(res));
  }
  return worst;
}

}  // namespace

CandidatePair CandidatePair::scaled(const QProfile& prof, double beta, double s1,
                                    double s2) {
  CandidatePair p;
  p.profile = &prof;
  p.beta = beta;
  p.scale1 = s1;
  p.scale2 = s2;
  p.u1 = sampled_multiple(prof, s1);
  p.u2 = sampled_multiple(prof, s2);
  return p;
}

CandidatePair CandidatePair::symmetric(const QProfile& prof, double beta) {
  double s = std::sqrt(1.0 / (1.0 + beta));
  return scaled(prof, beta, s, s);
}

CandidatePair CandidatePair::single(const QProfile& prof, double beta) {
  return scaled(prof, beta, 1.0, 0.0);
}

CandidatePair CandidatePair::zero(const QProfile& prof, double beta) {
  return scaled(prof, beta, 0.0, 0.0);
}

CandidatePair CandidatePair::transformed(const QProfile& prof, double beta) {
  return scaled(prof, beta, std::sqrt(2.0 / (1.0 + beta)), 0.0);
}

PairResidual system_residual(const CandidatePair& pair) {
  const double beta = pair.beta;
  PairResidual out;
  out.res1 = fd_residual(*pair.profile, pair.u1, pair.u2, [beta](double a, double b) {
    return a * a * a + beta * a * b * b;
  });
  out.res2 = fd_residual(*pair.profile, pair.u2, pair.u1, [beta](double a, double b) {
    return a * a * a + beta * a * b * b;
  });
  return out;
}

std::vector<double> nehari_membership(const CandidatePair& pair, NehariSet which) {
  const double a = pair.scale1, b = pair.scale2, beta = pair.beta;
  const double i2 = q_quadrature(*pair.profile, [](double q, double dq, double) {
    return dq * dq + q * q;
  });
  const double i4 =
      q_quadrature(*pair.profile, [](double q, double, double) { return q * q * q * q; });

  auto rel = [](double lhs, double rhs) {
    double scale = std::max(std::abs(lhs), std::abs(rhs));
    return scale > 0.0 ? std::abs(lhs - rhs) / scale : 0.0;
  };

  if (which == NehariSet::componentwise) {
    if (a == 0.0 || b == 0.0)
      throw std::domain_error(
          "nehari_membership: componentwise set requires both components nonzero");
    double lhs1 = a * a * i2, rhs1 = (a * a * a * a + beta * a * a * b * b) * i4;
    double lhs2 = b * b * i2, rhs2 = (b * b * b * b + beta * a * a * b * b) * i4;
    return {rel(lhs1, rhs1), rel(lhs2, rhs2)};
  }
  double lhs = (a * a + b * b) * i2;
  double rhs = (a * a * a * a + b * b * b * b + 2.0 * beta * a * a * b * b) * i4;
  return {rel(lhs, rhs)};
}

double energy(const CandidatePair& pair) {
  const double a = pair.scale1, b = pair.scale2, beta = pair.beta;
  const double i2 = q_quadrature(*pair.profile, [](double q, double dq, double) {
    return dq * dq + q * q;
  });
  const double i4 =
      q_quadrature(*pair.profile, [](double q, double, double) { return q * q * q * q; });
  const double four_pi = 4.0 * std::acos(-1.0);
  return four_pi * (0.5 * (a * a + b * b) * i2 -
                    0.25 * (a * a * a * a + b * b * b * b + 2.0 * beta * a * a * b * b) * i4);
}

PairResidual transformed_residual(const QProfile& prof, double beta) {
  CandidatePair pair = CandidatePair::transformed(prof, beta);
  PairResidual out;
  out.res1 = fd_residual(prof, pair.u1, pair.u2, [beta](double v1, double v2) {
    double s = v1 + v2, d = v1 - v2;
    return 0.25 * (s * s * s + d * d * d) + 0.5 * beta * (v1 * v1 - v2 * v2) * v1;
  });
  out.res2 = fd_residual(prof, pair.u2, pair.u1, [beta](double v2, double v1) {
    double s = v1 + v2, d = v1 - v2;
    return 0.25 * (s * s * s - d * d * d) - 0.5 * beta * (v1 * v1 - v2 * v2) * v2;
  });
  return out;
}

LinearizationMatrix linearization_matrix(const CandidatePair& pair) {
  const double a = pair.scale1, b = pair.scale2, beta = pair.beta;
  LinearizationMatrix m;
  m.diag1 = 3.0 * a * a + beta * b * b;
  m.diag2 = 3.0 * b * b + beta * a * a;
  m.offdiag = 2.0 * beta * a * b;
  return m;
}

}  // namespace solspec
