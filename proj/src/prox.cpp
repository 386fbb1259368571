#include "zoprox/prox.hpp"

#include <cmath>

namespace zoprox {

Regularizer Regularizer::lasso(double lambda1) {
  require(lambda1 >= 0.0, "lasso weight must be nonnegative");
  return {Kind::L1, lambda1, 0.0};
}

Regularizer Regularizer::squared_l2(double lambda2) {
  require(lambda2 >= 0.0, "squared-l2 weight must be nonnegative");
  return {Kind::SquaredL2, 0.0, lambda2};
}

Regularizer Regularizer::elastic_net(double lambda1, double lambda2) {
  require(lambda1 >= 0.0 && lambda2 >= 0.0, "elastic-net weights must be nonnegative");
  return {Kind::ElasticNet, lambda1, lambda2};
}

double Regularizer::value(const Vector& x) const {
  switch (kind) {
    case Kind::None:
      return 0.0;
    case Kind::L1:
      return l1 * x.lpNorm<1>();
    case Kind::SquaredL2:
      return l2 * x.squaredNorm();
    case Kind::ElasticNet:
      return l1 * x.lpNorm<1>() + l2 * x.squaredNorm();
  }
  return 0.0;
}

std::string Regularizer::name() const {
  switch (kind) {
    case Kind::None:
      return "none";
    case Kind::L1:
      return "l1";
    case Kind::SquaredL2:
      return "squared_l2";
    case Kind::ElasticNet:
      return "elastic_net";
  }
  return "unknown";
}

Vector prox(const Regularizer& reg, double tau, const Vector& v) {
  require(tau >= 0.0, "prox: tau must be nonnegative");
  if (reg.kind == Regularizer::Kind::None || tau == 0.0) return v;

  const double thresh = tau * reg.l1;
  const double shrink = 1.0 + 2.0 * tau * reg.l2;
  Vector out(v.size());
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    // max(.,0) sends the exact threshold |v_j| = tau*l1 to zero
    const double mag = std::max(std::abs(v[j]) - thresh, 0.0);
    out[j] = std::copysign(mag, v[j]) / shrink;
    if (mag == 0.0) out[j] = 0.0;
  }
  return out;
}

Vector prox_step(const Vector& x, const Vector& g, double eta, const Regularizer& reg) {
  require(eta > 0.0, "prox_step: eta must be positive");
  require(x.size() == g.size(), "prox_step: dimension mismatch");
  return prox(reg, eta, x - eta * g);
}

Vector grad_mapping(const Vector& x, const Vector& g, double eta, const Regularizer& reg) {
  // identity prox: skip the round trip through x - eta*g, which is not exact in floating point
  if (reg.kind == Regularizer::Kind::None) {
    require(eta > 0.0, "grad_mapping: eta must be positive");
    return g;
  }
  return (x - prox_step(x, g, eta, reg)) / eta;
}

}  // namespace zoprox
