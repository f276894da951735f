#include "solspec/operators.hpp"

#include <cmath>
#include <stdexcept>

namespace solspec {

double coupling_coefficient(double beta) {
  if (beta < 0.0) throw std::domain_error("coupling_coefficient: beta < 0");
  return (3.0 - beta) / (1.0 + beta);
}

double effective_beta(double c) {
  if (c <= 0.0 || c > 3.0) throw std::domain_error("effective_beta: c outside (0, 3]");
  return (3.0 - c) / (1.0 + c);
}

Coefficient OperatorSpec::weight(double lambda) const {
  const QProfile* prof = profile;
  const double c = coupling;
  const double m = mu();
  const double eps = 1.0 - lambda;
  return [prof, c, m, eps](double r) {
    QValue v = q_at(*prof, r);
    return eps + m / (r * r) - c * v.q * v.q;
  };
}

Coefficient OperatorSpec::weight_smooth(double lambda) const {
  const QProfile* prof = profile;
  const double c = coupling;
  const double eps = 1.0 - lambda;
  return [prof, c, eps](double r) {
    QValue v = q_at(*prof, r);
    return eps - c * v.q * v.q;
  };
}

MatrixOperatorSpec MatrixOperatorSpec::coupled_L(double beta) {
  return {MatrixKind::coupled, (3.0 + beta) / (1.0 + beta), (3.0 + beta) / (1.0 + beta),
          2.0 * beta / (1.0 + beta)};
}

MatrixOperatorSpec MatrixOperatorSpec::diagonal_D(double beta) {
  return {MatrixKind::diagonal, 3.0, coupling_coefficient(beta), 0.0};
}

MatrixOperatorSpec MatrixOperatorSpec::standard_L1(double beta) {
  return {MatrixKind::standard_solution, 3.0, beta, 0.0};
}

namespace {

// -v'' by central differences; first/last entries left as zero.
std::vector<double> neg_second_derivative(const std::vector<double>& v,
                                          const std::vector<double>& r) {
  std::vector<double> out(v.size(), 0.0);
  for (std::size_t i = 1; i + 1 < v.size(); ++i) {
    double hl = r[i] - r[i - 1], hr = r[i + 1] - r[i];
    out[i] = -2.0 * ((v[i + 1] - v[i]) / hr - (v[i] - v[i - 1]) / hl) / (hl + hr);
  }
  return out;
}

}  // namespace

std::vector<double> apply_radial(const OperatorSpec& op, const std::vector<double>& u,
                                 double lambda) {
  if (!op.profile) throw std::invalid_argument("apply_radial: no profile");
  const auto& r = op.profile->grid.nodes;
  if (u.size() != r.size()) throw std::invalid_argument("apply_radial: grid mismatch");
  std::vector<double> res = neg_second_derivative(u, r);
  const double m = op.mu();
  for (std::size_t i = 1; i + 1 < u.size(); ++i) {
    double q = op.profile->q[i];
    res[i] += (1.0 + m / (r[i] * r[i]) - op.coupling * q * q - lambda) * u[i];
  }
  return res;
}

std::pair<std::vector<double>, std::vector<double>> w_transform(
    const std::vector<double>& h1, const std::vector<double>& h2) {
  if (h1.size() != h2.size()) throw std::invalid_argument("w_transform: length mismatch");
  const double s = 1.0 / std::sqrt(2.0);
  std::vector<double> a(h1.size()), b(h1.size());
  for (std::size_t i = 0; i < h1.size(); ++i) {
    a[i] = s * (h1[i] + h2[i]);
    b[i] = s * (h1[i] - h2[i]);
  }
  return {std::move(a), std::move(b)};
}

double conjugation_check(double beta, const std::vector<double>& t1,
                         const std::vector<double>& t2, const QProfile& prof) {
  const auto& r = prof.grid.nodes;
  if (t1.size() != r.size() || t2.size() != r.size())
    throw std::invalid_argument("conjugation_check: grid mismatch");

  auto apply_scalar = [&](double coef, const std::vector<double>& v) {
    std::vector<double> out = neg_second_derivative(v, r);
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
      double q = prof.q[i];
      out[i] += (1.0 - coef * q * q) * v[i];
    }
    return out;
  };
  auto axpy_q2 = [&](std::vector<double>& dst, double coef, const std::vector<double>& v) {
    for (std::size_t i = 1; i + 1 < v.size(); ++i)
      dst[i] -= coef * prof.q[i] * prof.q[i] * v[i];
  };

  MatrixOperatorSpec L = MatrixOperatorSpec::coupled_L(beta);
  MatrixOperatorSpec D = MatrixOperatorSpec::diagonal_D(beta);

  // left side: W L W (W is an involution, so this is W^-1 L W)
  auto [w1, w2] = w_transform(t1, t2);
  std::vector<double> s1 = apply_scalar(L.diag1, w1);
  axpy_q2(s1, L.offdiag, w2);
  std::vector<double> s2 = apply_scalar(L.diag2, w2);
  axpy_q2(s2, L.offdiag, w1);
  auto [lhs1, lhs2] = w_transform(s1, s2);

  std::vector<double> rhs1 = apply_scalar(D.diag1, t1);
  std::vector<double> rhs2 = apply_scalar(D.diag2, t2);

  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < r.size(); ++i) {
    worst = std::max(worst, std::abs(lhs1[i] - rhs1[i]));
    worst = std::max(worst, std::abs(lhs2[i] - rhs2[i]));
  }
  return worst;
}

GeneralReduction general_reduction(double mu1, double mu2, double beta) {
  const double det = mu1 * mu2 - beta * beta;
  if (det == 0.0) throw std::domain_error("general_reduction: singular system");
  GeneralReduction out;
  out.k = (mu2 - beta) / det;
  out.l = (mu1 - beta) / det;
  out.positive = out.k > 0.0 && out.l > 0.0;
  out.reported_closed_form = 3.0 * (mu1 - beta) * (mu2 - beta) / det;
  if (!out.positive) return out;  // no positive reduction

  // Q^2-coefficient matrix of the linearization at (sqrt(k) Q, sqrt(l) Q).
  const double d1 = 3.0 * mu1 * out.k + beta * out.l;
  const double d2 = 3.0 * mu2 * out.l + beta * out.k;
  const double off = 2.0 * beta * std::sqrt(out.k * out.l);
  const double mean = 0.5 * (d1 + d2);
  const double disc = std::hypot(0.5 * (d1 - d2), off);
  out.eigen_coupling_lo = mean - disc;
  out.eigen_coupling_hi = mean + disc;
  out.closed_form_discrepancy =
      std::min(std::abs(out.reported_closed_form - out.eigen_coupling_lo),
               std::abs(out.reported_closed_form - out.eigen_coupling_hi));
  return out;
}

}  // namespace solspec
