#pragma once

#include <string>

#include "zoprox/types.hpp"

namespace zoprox {

/// Separable convex regularizer r(x) = l1*||x||_1 + l2*||x||_2^2.
/// Note the squared term carries no 1/2 factor.
struct Regularizer {
  enum class Kind { None, L1, SquaredL2, ElasticNet };

  Kind kind = Kind::None;
  double l1 = 0.0;
  double l2 = 0.0;

  static Regularizer none() { return {}; }
  static Regularizer lasso(double lambda1);
  static Regularizer squared_l2(double lambda2);
  static Regularizer elastic_net(double lambda1, double lambda2);

  double value(const Vector& x) const;
  std::string name() const;
};

/// argmin_z r(z) + ||z - v||^2 / (2 tau). tau = 0 returns v.
Vector prox(const Regularizer& reg, double tau, const Vector& v);

/// Prox_{eta r}(x - eta g).
Vector prox_step(const Vector& x, const Vector& g, double eta, const Regularizer& reg);

/// (x - prox_step(x, g, eta, reg)) / eta.
Vector grad_mapping(const Vector& x, const Vector& g, double eta, const Regularizer& reg);

}  // namespace zoprox
