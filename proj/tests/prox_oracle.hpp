#pragma once

#include <cmath>

#include "zoprox/prox.hpp"

namespace fixtures {

// Sign of phi(a) - phi(b) for phi(z) = r(z) + (z - v)^2 / (2 tau), with the
// difference formed term by term so it stays accurate near the minimizer.
inline double prox_objective_diff(const zoprox::Regularizer& reg, double tau, double v, double a, double b) {
  const double l1 = reg.kind == zoprox::Regularizer::Kind::L1 || reg.kind == zoprox::Regularizer::Kind::ElasticNet
                        ? reg.l1
                        : 0.0;
  const double l2 = reg.kind == zoprox::Regularizer::Kind::SquaredL2 ||
                            reg.kind == zoprox::Regularizer::Kind::ElasticNet
                        ? reg.l2
                        : 0.0;
  return l1 * (std::abs(a) - std::abs(b)) + l2 * (a - b) * (a + b) + (a - b) * (a + b - 2 * v) / (2 * tau);
}

/// Brute-force 1-d prox by ternary search.
inline double ternary_prox(const zoprox::Regularizer& reg, double tau, double v) {
  double lo = -std::abs(v) - 1.0, hi = std::abs(v) + 1.0;
  for (int it = 0; it < 400 && hi - lo > 0; ++it) {
    const double m1 = lo + (hi - lo) / 3, m2 = hi - (hi - lo) / 3;
    if (m1 == lo || m2 == hi) break;
    if (prox_objective_diff(reg, tau, v, m1, m2) < 0) {
      hi = m2;
    } else {
      lo = m1;
    }
  }
  // finish on the few floating-point values left in the bracket
  double best = lo;
  int steps = 0;
  for (double z = lo; z <= hi && steps < 64; z = std::nextafter(z, INFINITY), ++steps) {
    if (prox_objective_diff(reg, tau, v, z, best) < 0) best = z;
  }
  if (prox_objective_diff(reg, tau, v, 0.0, best) <= 0 && lo <= 0.0 && 0.0 <= hi) best = 0.0;
  return best;
}

}  // namespace fixtures
