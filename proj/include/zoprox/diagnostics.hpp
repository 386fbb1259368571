#pragma once

#include <vector>

#include "zoprox/reference.hpp"
#include "zoprox/solvers.hpp"

namespace zoprox {

enum class LedgerMode { Metered, Diagnostic };

/// ||grad F_lambda(x)|| = ||x - Prox_{lambda F}(x)|| / lambda.
///
/// The prox subproblem min_z F(z) + ||z - x||^2 / (2 lambda) is solved by
/// white-box proximal gradient in Diagnostic mode, and by proximal descent on
/// coordinated estimates charged to `ledger` in Metered mode. Iterates until
/// the error bound on the returned value is below `accuracy`.
double moreau_grad_norm(const BlackBoxProblem& problem, const Vector& x, double lambda, double accuracy,
                        LedgerMode mode, QueryLedger* ledger = nullptr);

/// Largest ||grad f^(stage)(x_s*)||^2 over the stages of a reduction trace,
/// where x_s* minimizes the stage problem (solved white-box to 1e-10).
struct StageErrorDiagnostic {
  /// convex reduction (fixed anchor); 0 for moving-anchor traces
  double gc_sq = 0.0;
  /// nonconvex reduction (moving anchor); 0 for fixed-anchor traces
  double gnc_sq = 0.0;
  std::vector<double> per_stage;
};

StageErrorDiagnostic estimate_stage_errors(const BlackBoxProblem& problem, const RunTrace& reduction_trace,
                                           ReferenceMethod method = ReferenceMethod::AcceleratedProxGradient);

}  // namespace zoprox
