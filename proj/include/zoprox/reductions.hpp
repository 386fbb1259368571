#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>

#include "zoprox/solvers.hpp"

namespace zoprox {

/// What a reduction hands its inner solver for one stage.
struct InnerRequest {
  const BlackBoxProblem& problem;
  /// strong-convexity parameter of the stage problem's smooth part
  double strong_convexity;
  const Vector& start;
  /// absolute ledger cap for this call
  std::uint64_t fqc_budget;
};

/// Any solver with the ZOOD contract. The reduction continues from
/// zood_output() of the returned trace.
using InnerSolver = std::function<RunTrace(const InnerRequest&, Rng&, QueryLedger&)>;

/// Theory-mode inner configuration that contracts the stage gap by at most
/// `contraction`. SVRG variants: theory parameters, ceil(log K / log(3/4))
/// epochs. SAGA: theory parameters and the smallest iteration count K with
/// (1/(2 eta)) (1 - eta gamma/2)^K (2/gamma + 2 eta + c) <= contraction.
SolverConfig inner_budget(SolverKind kind, double contraction, double L, double gamma, std::size_t d,
                          std::size_t n);

inline constexpr std::size_t kSagaIterationCap = 10'000'000;

/// Wraps one of the library solvers. Tuned mode runs `epochs_per_stage`
/// epochs (SVRG) or epochs_per_stage * ceil(n/b) iterations (SAGA, RSPGF)
/// per stage; theory mode uses inner_budget.
InnerSolver make_inner_solver(SolverKind kind, ParamMode mode, double contraction,
                              std::size_t epochs_per_stage = 2, std::optional<double> mu = std::nullopt);

struct SwitchDecision {
  bool switch_now = false;
  /// number of completed stages when the decision was taken
  std::size_t after_stage = 0;
  double improvement = 0.0;
  SolverKind fallback = SolverKind::ZoSvrgCoord;
};

/// Switch when the latest stage improved F by less than `threshold`
/// (strict). `stage_objectives` holds F(x_0), F(x_1), ..., one per stage
/// boundary.
SwitchDecision switch_orchestrator(std::span<const double> stage_objectives, double threshold,
                                   SolverKind fallback = SolverKind::ZoSvrgCoord);

inline constexpr double kConvexSwitchThreshold = 1e-3;
inline constexpr double kNonconvexSwitchThreshold = 3e-4;

struct FallbackConfig {
  bool enabled = true;
  SolverKind kind = SolverKind::ZoSvrgCoord;
  /// epochs to run when the reduction has no finite budget to hand over
  std::size_t epochs_without_budget = 10;
  std::optional<double> mu;
};

struct ReductionConfigC {
  double gamma0 = 5e-4;
  double contraction = 0.25;
  std::size_t stages = 10;
  double switch_threshold = kConvexSwitchThreshold;
  std::uint64_t fqc_budget = kUnlimitedBudget;
  FallbackConfig fallback;

  void validate() const;
};

struct ReductionConfigNC {
  double sigma = 5e-4;
  std::size_t stages = 10;
  double switch_threshold = kNonconvexSwitchThreshold;
  std::uint64_t fqc_budget = kUnlimitedBudget;
  FallbackConfig fallback;

  double lambda() const { return 1.0 / (2.0 * sigma); }
  void validate() const;
};

/// Stage s minimizes F(x) + (gamma_s/2)||x - x0||^2 from x_s, with the anchor
/// fixed at the original x0 and gamma_{s+1} = sqrt(K) gamma_s.
RunTrace adapt_rdct_c(const BlackBoxProblem& problem, const ReductionConfigC& cfg, const InnerSolver& inner,
                      const Vector& x0, Rng& rng, QueryLedger& ledger);

/// Stage s minimizes F(x) + sigma ||x - x_{s-1}||^2 from x_{s-1}; the output
/// is a uniformly drawn stage point x_alpha (or the fallback result after a
/// switch).
RunTrace adapt_rdct_nc(const BlackBoxProblem& problem, const ReductionConfigNC& cfg, const InnerSolver& inner,
                       const Vector& x0, Rng& rng, QueryLedger& ledger);

}  // namespace zoprox
