#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "zoprox/estimators.hpp"
#include "zoprox/problem.hpp"

namespace zoprox {

enum class SnapshotMode { RandomIterate, Average, Last };
enum class ParamMode { Theory, Tuned };
enum class SolverKind { ZorSvrg, ZorSaga, Rspgf, ZoSvrgCoord };

std::string to_string(SnapshotMode mode);
std::string to_string(SolverKind kind);
SnapshotMode parse_snapshot_mode(const std::string& s);
SolverKind parse_solver_kind(const std::string& s);

inline constexpr std::uint64_t kUnlimitedBudget = std::numeric_limits<std::uint64_t>::max();

/// One inner step, reported to SolverConfig::on_iteration. `anchor_grad` is
/// the variance-reduction anchor before the step (v_s for SVRG, g^k for SAGA,
/// zero for RSPGF) and `correction` the batch difference added to it.
struct IterationRecord {
  std::size_t epoch = 0;
  std::size_t k = 0;
  Vector x;
  Vector anchor_grad;
  Vector correction;
  Vector direction;
};

struct SolverConfig {
  double eta = 0.0;
  std::size_t b = 1;
  /// Inner-loop length; SVRG variants only.
  std::size_t m = 1;
  /// Outer epochs S for SVRG variants, iteration count K for SAGA and RSPGF.
  std::size_t epochs = 1;
  std::optional<double> mu;
  SnapshotMode snapshot = SnapshotMode::RandomIterate;
  ParamMode mode = ParamMode::Tuned;
  /// Absolute ledger cap. A unit of work (epoch, iteration) whose cost would
  /// push the ledger past the cap is not started.
  std::uint64_t fqc_budget = kUnlimitedBudget;
  /// Checkpoint spacing in queries; 0 checkpoints at every epoch for SVRG
  /// variants and every ceil(n/b) iterations for SAGA and RSPGF.
  std::uint64_t checkpoint_every = 0;
  std::function<void(const IterationRecord&)> on_iteration;

  void validate(const ProblemMeta& meta, SolverKind kind) const;
};

struct Checkpoint {
  std::uint64_t fqc = 0;
  double objective = 0.0;
  std::size_t epoch = 0;
  Vector x;
  /// steady_clock seconds at the time the checkpoint was taken
  double clock_s = 0.0;
  std::map<std::string, double> extra;
};

/// One stage of a reduction run.
struct StageRecord {
  std::size_t index = 0;
  double coeff = 0.0;
  Vector anchor;
  Vector start;
  Vector output;
  double strong_convexity = 0.0;
  std::uint64_t fqc_end = 0;
  double objective = 0.0;
  std::size_t inner_epochs = 0;
};

struct RunTrace {
  std::string algorithm;
  std::vector<Checkpoint> checkpoints;
  Vector output;
  std::optional<Vector> snapshot_output;
  SnapshotMode snapshot_mode = SnapshotMode::RandomIterate;
  std::size_t units_completed = 0;
  bool budget_exhausted = false;

  // reduction runs only
  std::vector<StageRecord> stages;
  std::optional<std::size_t> alpha_index;
  std::optional<std::size_t> switch_stage;
  bool moving_anchor = false;

  std::uint64_t final_fqc() const { return checkpoints.empty() ? 0 : checkpoints.back().fqc; }
};

/// The realized ZOOD constants of a configuration (test artifacts only).
struct ZoodEstimate {
  double contraction = 0.0;
  double mu_floor = 0.0;
  double residual = 0.0;
};

/// Raised when an iterate leaves the finite region (||x|| > 1e8, NaN, inf).
/// Carries the trace up to the last finite checkpoint.
class SolverDivergence : public std::runtime_error {
 public:
  SolverDivergence(const std::string& what, RunTrace partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  const RunTrace& partial() const { return partial_; }

 private:
  RunTrace partial_;
};

RunTrace zor_prox_svrg(const BlackBoxProblem& problem, const SolverConfig& config, const Vector& x0,
                       Rng& rng, QueryLedger& ledger);
RunTrace zor_prox_saga(const BlackBoxProblem& problem, const SolverConfig& config, const Vector& x0,
                       Rng& rng, QueryLedger& ledger);
RunTrace rspgf_baseline(const BlackBoxProblem& problem, const SolverConfig& config, const Vector& x0,
                        Rng& rng, QueryLedger& ledger);
/// SVRG control flow with coordinated estimates everywhere. Used as the
/// fallback solver of the reductions.
RunTrace zo_prox_svrg_coord(const BlackBoxProblem& problem, const SolverConfig& config, const Vector& x0,
                            Rng& rng, QueryLedger& ledger);

RunTrace run_solver(SolverKind kind, const BlackBoxProblem& problem, const SolverConfig& config,
                    const Vector& x0, Rng& rng, QueryLedger& ledger);

/// The point a reduction should continue from: the snapshot for SVRG
/// variants, the output otherwise.
const Vector& zood_output(const RunTrace& trace);

struct SvrgParams {
  double eta = 0.0;
  std::size_t b = 0;
  std::size_t m = 0;
};
struct SagaParams {
  double eta = 0.0;
  std::size_t b = 0;
};

/// eta = 3/(170 d L), b = 25, m = ceil(190 d L / gamma); per-epoch ratio 3/4.
SvrgParams svrg_theory_params(double L, double gamma, std::size_t d, std::size_t n);
/// eta = min(1/(95 d L), 2/(3 n gamma)), b = 6.
SagaParams saga_theory_params(double L, double gamma, std::size_t d, std::size_t n);

/// Desk-scale defaults: eta = 0.1/L, b = min(n, 10), m = ceil(n/b).
SolverConfig tuned_config(SolverKind kind, const BlackBoxProblem& problem, std::size_t epochs);

/// Per-epoch query cost of the SVRG variants: 2n + 4bm, or d times that for
/// the coordinated one.
std::uint64_t svrg_epoch_cost(SolverKind kind, std::size_t n, std::size_t d, std::size_t b, std::size_t m);

}  // namespace zoprox
