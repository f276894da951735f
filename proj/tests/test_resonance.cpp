#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "solspec/resonance.hpp"

using namespace solspec;

namespace {

const QProfile& profile() {
  static QProfile prof = solve_ground_state();
  return prof;
}

}  // namespace

TEST_CASE("free threshold solutions match their closed forms") {
  auto line = threshold_solution(profile(), 0.0, 0.0);
  auto sinh_half = threshold_solution(profile(), 0.0, 0.25);
  double worst_line = 0.0, worst_sinh = 0.0;
  for (std::size_t i = 0; i < line.size(); ++i) {
    double r = line.grid.nodes[i];
    worst_line = std::max(worst_line, std::abs(line.u[i] + r));
    double exact = -2.0 * std::sinh(0.5 * r);
    worst_sinh = std::max(worst_sinh, std::abs(sinh_half.u[i] - exact) / std::abs(exact));
  }
  CHECK(worst_line < 1e-10);
  CHECK(worst_sinh < 1e-9);
  CHECK_THROWS_AS(threshold_solution(profile(), 1.0, -0.5), std::invalid_argument);
  CHECK_THROWS_AS(threshold_solution(profile(), 1.0, 100.0), std::invalid_argument);
}

TEST_CASE("scaling the initial slope scales the fitted tail slope linearly") {
  // the equation is linear, so the detector output must be homogeneous
  double s1 = resonance_tail_slope(profile(), coupling_coefficient(0.5));
  auto sol = threshold_solution(profile(), coupling_coefficient(0.5), 0.0);
  // doubled data = doubled solution; the slope of 2 F over the same window
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  double rmax = profile().r_max();
  for (std::size_t i = 0; i < sol.size(); ++i) {
    double r = sol.grid.nodes[i];
    if (r < 2.0 * rmax / 3.0) continue;
    double v = 2.0 * sol.u[i];
    sx += r; sy += v; sxx += r * r; sxy += r * v;
    ++n;
  }
  double slope2 = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  CHECK(slope2 == doctest::Approx(2.0 * s1).epsilon(1e-12));
}

TEST_CASE("every in-scope coupling is certified resonance-free") {
  for (double c : {3.0, 1.0, coupling_coefficient(0.25), coupling_coefficient(0.75)}) {
    auto v = resonance_verdict_coupling(profile(), c);
    CHECK(v.classification == ResonanceClass::no_resonance);
    CHECK(std::abs(v.tail_slope) > 1e-3);
    CHECK(v.fit_residual < 1e-6 * std::abs(v.tail_slope) * profile().r_max());
  }
}

TEST_CASE("weighted-norm truncations grow without bound") {
  auto v = resonance_verdict(profile(), 0.5);
  REQUIRE(v.weighted_norms.size() == 3);
  const auto& quarter = v.weighted_norms[0];
  const auto& half = v.weighted_norms[1];
  const auto& full = v.weighted_norms[2];
  // every column grows strictly under doubling of the truncation radius
  for (int g = 0; g < 4; ++g) {
    CHECK(half.norm[g] > quarter.norm[g]);
    CHECK(full.norm[g] > half.norm[g]);
  }
  // the unweighted column tracks the cubic growth of a linear tail within 20%
  CHECK(full.norm[0] / half.norm[0] > 8.0 * 0.8);
  CHECK(full.norm[0] / half.norm[0] < 8.0 * 1.2);
}

TEST_CASE("synthetic coupling control flips the verdict") {
  double c = coupling_coefficient(0.5);
  double alpha = synthetic_resonant_scale(profile(), c);
  CHECK(alpha > 1.0);
  auto flipped = resonance_verdict_coupling(profile(), alpha * c);
  CHECK(flipped.classification == ResonanceClass::resonance_suspected);
  CHECK(std::abs(flipped.tail_slope) < 1e-3);
}

TEST_CASE("comparison zeros appear in the proven order") {
  auto rec = sturm_record(profile(), 0.5, {0.1, 0.3, 0.5});
  CHECK(rec.pass);
  CHECK(rec.unique_zero_ok);
  CHECK(rec.g_zero_count == 1);
  CHECK(rec.ordering_ok);
  CHECK(rec.r_star > 0.0);
  CHECK(rec.r_star <= rec.r_0);
  for (std::size_t i = 0; i < rec.r_eps.size(); ++i) {
    CHECK(rec.r_0 <= rec.r_eps[i] + 1e-12);
    if (i > 0) CHECK(rec.r_eps[i - 1] <= rec.r_eps[i] + 1e-12);
  }
  CHECK(rec.shifted_minimum > 0.0);
}

TEST_CASE("zero locations are stable across couplings in the right direction") {
  // weaker coupling (larger beta) pushes the first zero outward
  auto rec_weak = sturm_record(profile(), 0.8, {0.1});
  auto rec_strong = sturm_record(profile(), 0.2, {0.1});
  CHECK(rec_strong.r_0 < rec_weak.r_0);
  // both share the same comparison zero r_* (it only involves coupling 3)
  CHECK(rec_weak.r_star == doctest::Approx(rec_strong.r_star).epsilon(1e-12));
}

TEST_CASE("shifted renormalized comparison dominates pointwise") {
  for (double eps : {0.0, 0.3}) {
    auto sc = shifted_comparison(profile(), 0.5, eps);
    CHECK(sc.pass);
    CHECK(sc.min_gap >= -1e-8);
    CHECK(sc.min_ratio > 0.0);
  }
}

TEST_CASE("sector identity closes term by term") {
  for (int k : {1, 4}) {
    for (double beta : {0.25, 0.75}) {
      auto id = nonradial_identity(profile(), beta, k);
      CHECK(id.residual < 1e-6);
      CHECK(id.rho_is_cutoff);  // the sector solution never vanishes
      CHECK(id.sign_term2_ok);
      CHECK(id.sign_term3_ok);
      if (k == 1) CHECK(id.term_interior == 0.0);  // coefficient 2 - mu vanishes
    }
  }
  // sector index maps to the angular eigenvalue by harmonic degree
  CHECK(sector_mu(1) == doctest::Approx(2.0));
  CHECK(sector_mu(3) == doctest::Approx(2.0));
  CHECK(sector_mu(4) == doctest::Approx(6.0));
  CHECK(sector_mu(8) == doctest::Approx(6.0));
  CHECK(sector_mu(9) == doctest::Approx(12.0));
  CHECK_THROWS_AS(sector_mu(0), std::invalid_argument);
}

TEST_CASE("identity is homogeneous in the start value") {
  auto a = nonradial_identity(profile(), 0.5, 1, 1.0);
  auto b = nonradial_identity(profile(), 0.5, 1, 2.5);
  CHECK(b.term_coupling == doctest::Approx(2.5 * a.term_coupling).epsilon(1e-9));
  CHECK(b.residual < 1e-6);
}

TEST_CASE("vanishing-coupling limit kills the interaction term") {
  auto id = nonradial_identity(profile(), 0.0, 4);
  CHECK(id.term_coupling == 0.0);
  CHECK(id.residual < 1e-6);  // two-term balance remains exact
}
