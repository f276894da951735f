#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace solspec {

/// Strictly increasing radial nodes on (0, R_max], last node == R_max.
struct RadialGrid {
  std::vector<double> nodes;
  double r_max = 0.0;

  std::size_t size() const { return nodes.size(); }

  /// r0, r0+h, ..., R_max (the final step is shortened if h does not divide).
  static RadialGrid uniform(double r0, double rmax, double h);

  void validate() const;
};

/// Sampled solution of u'' = W(r) u together with its derivative.
struct RadialSolution {
  RadialGrid grid;
  std::vector<double> u;   // u at nodes
  std::vector<double> du;  // u' at nodes
  double u0 = 0.0;         // limit values at r = 0
  double du0 = 0.0;

  // Set when |u| exceeded the overflow guard; values past blowup_radius
  // are not stored.
  bool blew_up = false;
  double blowup_radius = 0.0;

  std::size_t size() const { return u.size(); }
};

inline RadialGrid RadialGrid::uniform(double r0, double rmax, double h) {
  if (r0 <= 0.0 || rmax <= r0 || h <= 0.0)
    throw std::invalid_argument("RadialGrid::uniform: bad parameters");
  RadialGrid g;
  g.r_max = rmax;
  g.nodes.reserve(static_cast<std::size_t>((rmax - r0) / h) + 2);
  double r = r0;
  while (r < rmax - 0.5 * h) {
    g.nodes.push_back(r);
    r += h;
  }
  g.nodes.push_back(rmax);
  return g;
}

inline void RadialGrid::validate() const {
  if (nodes.empty()) throw std::invalid_argument("RadialGrid: empty");
  if (nodes.front() <= 0.0) throw std::invalid_argument("RadialGrid: first node must be > 0");
  for (std::size_t i = 1; i < nodes.size(); ++i)
    if (nodes[i] <= nodes[i - 1])
      throw std::invalid_argument("RadialGrid: nodes not strictly increasing");
  if (nodes.back() != r_max) throw std::invalid_argument("RadialGrid: last node != r_max");
}

}  // namespace solspec
