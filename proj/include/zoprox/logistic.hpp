#pragma once

#include "zoprox/dataset.hpp"
#include "zoprox/problem.hpp"

namespace zoprox {

struct LogisticSpec {
  double lambda1 = 1e-3;
  double lambda2 = 1e-5;
  /// weight of the nonconvex term; 0 for the convex problem
  double alpha = 0.0;

  void validate() const;
};

/// f_i(w) = log(1 + exp(w.x_i)) - y_i w.x_i with r = ElasticNet(lambda1, lambda2).
/// L = max_i ||x_i||^2 / 4.
BlackBoxProblem make_logistic(const Dataset& data, const LogisticSpec& spec);

/// make_logistic plus alpha * sum_j w_j^2 / (1 + w_j^2) on every component.
/// sigma = 2 alpha, L grows by 2 alpha.
BlackBoxProblem make_nc_logistic(const Dataset& data, const LogisticSpec& spec);

/// numerically stable log(1 + exp(z))
double softplus(double z);
double sigmoid(double z);

}  // namespace zoprox
