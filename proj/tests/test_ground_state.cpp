#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "solspec/ground_state.hpp"

using namespace solspec;

namespace {

const QProfile& profile() {
  static QProfile prof = solve_ground_state();
  return prof;
}

}  // namespace

TEST_CASE("center value matches the frozen reference") {
  // reference derived independently (collocation + Richardson), frozen here
  CHECK(profile().center_value == doctest::Approx(4.33738768).epsilon(1e-8));
}

TEST_CASE("profile is positive and strictly decreasing") {
  const QProfile& p = profile();
  CHECK(p.q.front() < p.center_value);
  for (std::size_t i = 0; i < p.q.size(); ++i) {
    CHECK(p.q[i] > 0.0);
    if (i > 0) CHECK(p.q[i] < p.q[i - 1]);
    CHECK(p.dq[i] <= 0.0);
  }
}

TEST_CASE("ODE residual and tail model meet construction guarantees") {
  const QProfile& p = profile();
  CHECK(p.residual_sup < 1e-8);
  CHECK(p.decay_rate == doctest::Approx(1.0).epsilon(1e-3));
  // tail model: r Q e^{r} approaches the fitted amplitude
  double probe = p.tail_amp;
  QValue tail = q_at(p, 25.0);
  CHECK(25.0 * tail.q * std::exp(25.0) == doctest::Approx(probe).epsilon(1e-3));
}

TEST_CASE("virial-type integral identity holds") {
  // Multiplying the equation by Q and integrating: the gradient-plus-mass
  // integral equals the quartic integral.
  const QProfile& p = profile();
  double lhs = q_quadrature(p, [](double q, double dq, double) {
    return dq * dq + q * q;
  });
  double rhs = q_quadrature(p, [](double q, double, double) { return q * q * q * q; });
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-8));
  // frozen derived value of the shared integral
  CHECK(rhs == doctest::Approx(6.01518192).epsilon(1e-7));
}

TEST_CASE("interpolation is consistent with the sampled nodes and the series") {
  const QProfile& p = profile();
  QValue at0 = q_at(p, 0.0);
  CHECK(at0.q == doctest::Approx(p.center_value).epsilon(1e-12));
  CHECK(at0.dq == doctest::Approx(0.0));
  // node hits are exact
  QValue node = q_at(p, p.grid.nodes[100]);
  CHECK(node.q == p.q[100]);
  // midpoints stay between neighbors (monotone profile)
  double mid = 0.5 * (p.grid.nodes[100] + p.grid.nodes[101]);
  QValue vm = q_at(p, mid);
  CHECK(vm.q < p.q[100]);
  CHECK(vm.q > p.q[101]);
  // beyond the truncation radius the tail model is flagged
  CHECK(q_at(p, p.r_max() + 1.0).extrapolated);
  CHECK_FALSE(q_at(p, 1.0).extrapolated);
}

TEST_CASE("quadrature rejects non-decaying integrands") {
  CHECK_THROWS_AS(q_quadrature(profile(), [](double, double, double) { return 1.0; }),
                  std::domain_error);
}

TEST_CASE("cache round-trip is bit-exact") {
  const QProfile& p = profile();
  const std::string path = "q_cache_roundtrip_test.csv";
  save_q_cache(p, path);
  QProfile back = load_q_cache(path);
  REQUIRE(back.q.size() == p.q.size());
  for (std::size_t i = 0; i < p.q.size(); ++i) {
    CHECK(back.grid.nodes[i] == p.grid.nodes[i]);
    CHECK(back.q[i] == p.q[i]);
    CHECK(back.dq[i] == p.dq[i]);
  }
  CHECK(back.center_value == p.center_value);
  CHECK(back.decay_rate == p.decay_rate);
  CHECK(back.tail_amp == p.tail_amp);
  CHECK(back.residual_sup == p.residual_sup);

  // a second save produces byte-identical content
  const std::string path2 = "q_cache_roundtrip_test2.csv";
  save_q_cache(back, path2);
  std::ifstream f1(path, std::ios::binary), f2(path2, std::ios::binary);
  std::stringstream s1, s2;
  s1 << f1.rdbuf();
  s2 << f2.rdbuf();
  CHECK(s1.str() == s2.str());
  CHECK(s1.str().find("\r") == std::string::npos);
  std::remove(path.c_str());
  std::remove(path2.c_str());
}

TEST_CASE("cached accessor loads what it saved") {
  const std::string path = "q_cache_accessor_test.csv";
  std::remove(path.c_str());
  QProfile first = ground_state_cached(path);
  QProfile second = ground_state_cached(path);  // served from the file
  CHECK(first.center_value == second.center_value);
  CHECK(first.q == second.q);
  std::remove(path.c_str());
}

TEST_CASE("truncation radius variation leaves the core profile unchanged") {
  GroundStateParams params;
  params.r_max = 25.0;
  QProfile shorter = solve_ground_state(1e-12, params);
  CHECK(shorter.center_value ==
        doctest::Approx(profile().center_value).epsilon(1e-10));
}
