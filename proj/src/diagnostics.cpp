#include "zoprox/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "zoprox/estimators.hpp"

namespace zoprox {

namespace {

constexpr std::size_t kMoreauMaxIter = 1'000'000;

double stage_strong_convexity(const ProblemMeta& meta) {
  return meta.convexity == ConvexityTag::StronglyConvex ? meta.gamma : 0.0;
}

}  // namespace

double moreau_grad_norm(const BlackBoxProblem& problem, const Vector& x, double lambda, double accuracy,
                        LedgerMode mode, QueryLedger* ledger) {
  require(lambda > 0.0, "moreau_grad_norm: lambda must be positive");
  require(accuracy > 0.0, "moreau_grad_norm: accuracy must be positive");
  if (problem.meta().sigma > 0.0) {
    require(lambda < 1.0 / problem.meta().sigma, "moreau_grad_norm: lambda must be below 1/sigma");
  }
  if (mode == LedgerMode::Metered) require(ledger != nullptr, "moreau_grad_norm: metered mode needs a ledger");
  if (mode == LedgerMode::Diagnostic && !problem.has_whitebox()) {
    throw UnsupportedMode("moreau_grad_norm: diagnostic mode needs white-box gradients");
  }

  const BlackBoxProblem sub = problem.augment_quadratic(1.0 / lambda, x);
  const double strong = stage_strong_convexity(sub.meta());
  require(strong > 0.0, "moreau_grad_norm: prox subproblem is not strongly convex");
  const double eta = 1.0 / sub.meta().L;
  const double mu = default_mu(problem.d());

  // ||z - z*|| <= (2/strong) ||G(z)||, and the returned value moves by at most ||z - z*|| / lambda
  const double target = accuracy * strong * lambda / 2.0;
  Vector z = x;
  double res = 0.0;
  for (std::size_t it = 0; it < kMoreauMaxIter; ++it) {
    const Vector g = mode == LedgerMode::Diagnostic ? sub.smooth_gradient(z) : full_coord_est(sub, z, mu, *ledger);
    const Vector next = prox_step(z, g, eta, sub.regularizer());
    res = (z - next).norm() / eta;
    if (res <= target) return (x - z).norm() / lambda;
    z = next;
  }
  throw ConvergenceError("moreau_grad_norm: prox subproblem did not converge", res);
}

StageErrorDiagnostic estimate_stage_errors(const BlackBoxProblem& problem, const RunTrace& reduction_trace,
                                           ReferenceMethod method) {
  if (!problem.has_whitebox()) throw UnsupportedMode("estimate_stage_errors needs white-box gradients");
  StageErrorDiagnostic out;
  double worst = 0.0;
  for (const auto& stage : reduction_trace.stages) {
    const BlackBoxProblem sub = problem.augment_quadratic(stage.coeff, stage.anchor);
    const ReferenceResult ref = reference_solve(sub, stage.output, 1e-10, 5'000'000, method);
    const double g2 = sub.smooth_gradient(ref.x).squaredNorm();
    out.per_stage.push_back(g2);
    worst = std::max(worst, g2);
  }
  if (reduction_trace.moving_anchor) {
    out.gnc_sq = worst;
  } else {
    out.gc_sq = worst;
  }
  return out;
}

}  // namespace zoprox
