#include "zoprox/logistic.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace zoprox {

void LogisticSpec::validate() const {
  require(lambda1 >= 0.0 && lambda2 >= 0.0 && alpha >= 0.0, "LogisticSpec: weights must be nonnegative");
  require(std::isfinite(lambda1) && std::isfinite(lambda2) && std::isfinite(alpha),
          "LogisticSpec: weights must be finite");
}

double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

namespace {

double max_row_sq(const Dataset& data) {
  double m = 0.0;
  for (const auto& row : data.rows) m = std::max(m, sparse_squared_norm(row));
  return m;
}

// keeps meta.L positive when every row is empty
constexpr double kMinSmoothness = 1e-12;

struct Logistic {
  std::shared_ptr<const Dataset> data;
  double alpha = 0.0;

  double value(std::size_t i, const Vector& w) const {
    const double z = sparse_dot(data->rows[i], w);
    double v = softplus(z) - data->labels[i] * z;
    if (alpha > 0.0) v += alpha * (w.array().square() / (1.0 + w.array().square())).sum();
    return v;
  }

  Vector gradient(std::size_t i, const Vector& w) const {
    const SparseRow& row = data->rows[i];
    const double r = sigmoid(sparse_dot(row, w)) - data->labels[i];
    Vector g = Vector::Zero(w.size());
    for (const auto& e : row) g[e.index] += r * e.value;
    if (alpha > 0.0) g.array() += 2.0 * alpha * w.array() / (1.0 + w.array().square()).square();
    return g;
  }
};

BlackBoxProblem build(const Dataset& data, const LogisticSpec& spec, double alpha) {
  spec.validate();
  require(data.n() >= 1, "logistic: dataset is empty");
  require(data.d >= 1, "logistic: dataset has no features");
  data.validate();
  auto model = std::make_shared<const Logistic>(Logistic{std::make_shared<const Dataset>(data), alpha});

  ProblemMeta meta;
  meta.L = std::max(max_row_sq(data) / 4.0, kMinSmoothness) + 2.0 * alpha;
  meta.gamma = 0.0;
  meta.sigma = 2.0 * alpha;
  meta.convexity = alpha > 0.0 ? ConvexityTag::WeaklyConvex : ConvexityTag::Convex;

  return BlackBoxProblem(
      data.n(), data.d, [model](std::size_t i, const Vector& w) { return model->value(i, w); },
      Regularizer::elastic_net(spec.lambda1, spec.lambda2), meta,
      [model](std::size_t i, const Vector& w) { return model->gradient(i, w); });
}

}  // namespace

BlackBoxProblem make_logistic(const Dataset& data, const LogisticSpec& spec) {
  require(spec.alpha == 0.0, "make_logistic: alpha must be 0, use make_nc_logistic");
  return build(data, spec, 0.0);
}

BlackBoxProblem make_nc_logistic(const Dataset& data, const LogisticSpec& spec) {
  require(spec.alpha > 0.0, "make_nc_logistic: alpha must be positive");
  return build(data, spec, spec.alpha);
}

}  // namespace zoprox
