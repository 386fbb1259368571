#include "zoprox/reference.hpp"

#include <cmath>

namespace zoprox {

double whitebox_mapping_norm(const BlackBoxProblem& problem, const Vector& x) {
  const double eta = 1.0 / problem.meta().L;
  return grad_mapping(x, problem.smooth_gradient(x), eta, problem.regularizer()).norm();
}

namespace {

ReferenceResult done(const BlackBoxProblem& problem, Vector x, std::size_t it, double res) {
  ReferenceResult r;
  r.objective = problem.diagnostic_objective(x);
  r.x = std::move(x);
  r.iterations = it;
  r.mapping_norm = res;
  return r;
}

ReferenceResult prox_gradient(const BlackBoxProblem& problem, const Vector& x0, double tol,
                              std::size_t max_iter) {
  const double eta = 1.0 / problem.meta().L;
  const Regularizer& reg = problem.regularizer();
  Vector x = x0;
  double res = 0.0;
  for (std::size_t it = 0; it < max_iter; ++it) {
    const Vector next = prox_step(x, problem.smooth_gradient(x), eta, reg);
    res = (x - next).norm() / eta;
    if (res <= tol) return done(problem, x, it, res);
    x = next;
  }
  throw ConvergenceError("reference proximal gradient hit the iteration cap", res);
}

// FISTA with gradient-based adaptive restart
ReferenceResult accelerated(const BlackBoxProblem& problem, const Vector& x0, double tol,
                            std::size_t max_iter) {
  const double eta = 1.0 / problem.meta().L;
  const Regularizer& reg = problem.regularizer();
  Vector x = x0;
  Vector y = x0;
  double t = 1.0;
  double res = 0.0;
  for (std::size_t it = 0; it < max_iter; ++it) {
    const Vector next = prox_step(y, problem.smooth_gradient(y), eta, reg);
    if (it % 8 == 0) {
      res = whitebox_mapping_norm(problem, next);
      if (res <= tol) return done(problem, next, it, res);
    }
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    if ((y - next).dot(next - x) > 0.0) {
      y = next;
      t = 1.0;
    } else {
      y = next + ((t - 1.0) / t_next) * (next - x);
      t = t_next;
    }
    x = next;
  }
  throw ConvergenceError("reference accelerated proximal gradient hit the iteration cap", res);
}

}  // namespace

ReferenceResult reference_solve(const BlackBoxProblem& problem, const Vector& x0, double tol,
                                std::size_t max_iter, ReferenceMethod method) {
  require(tol > 0.0, "reference_solve: tol must be positive");
  if (!problem.has_whitebox()) throw UnsupportedMode("reference_solve needs white-box gradients");
  return method == ReferenceMethod::ProxGradient ? prox_gradient(problem, x0, tol, max_iter)
                                                 : accelerated(problem, x0, tol, max_iter);
}

}  // namespace zoprox
