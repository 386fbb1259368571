#pragma once

#include <cstddef>

#include "zoprox/problem.hpp"

namespace zoprox {

// White-box reference solvers. They read gradients through the diagnostic
// channel and never touch a ledger; use them for F*, test oracles and
// post-hoc diagnostics only.

enum class ReferenceMethod { ProxGradient, AcceleratedProxGradient };

struct ReferenceResult {
  Vector x;
  double objective = 0.0;
  std::size_t iterations = 0;
  /// ||grad mapping|| at x with step 1/L
  double mapping_norm = 0.0;
};

/// Stops once the gradient mapping at the iterate has norm <= tol.
/// Throws ConvergenceError if max_iter is reached first.
ReferenceResult reference_solve(const BlackBoxProblem& problem, const Vector& x0, double tol,
                                std::size_t max_iter = 2'000'000,
                                ReferenceMethod method = ReferenceMethod::AcceleratedProxGradient);

/// ||(x - Prox_{r/L}(x - grad f(x)/L)) * L||, the stationarity measure
/// reported for nonconvex runs.
double whitebox_mapping_norm(const BlackBoxProblem& problem, const Vector& x);

}  // namespace zoprox
