#include "zoprox/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace zoprox {

std::string to_string(SnapshotMode mode) {
  switch (mode) {
    case SnapshotMode::RandomIterate:
      return "random_iterate";
    case SnapshotMode::Average:
      return "average";
    case SnapshotMode::Last:
      return "last";
  }
  return "unknown";
}

std::string to_string(SolverKind kind) {
  switch (kind) {
    case SolverKind::ZorSvrg:
      return "zor_svrg";
    case SolverKind::ZorSaga:
      return "zor_saga";
    case SolverKind::Rspgf:
      return "rspgf";
    case SolverKind::ZoSvrgCoord:
      return "zo_svrg_coord";
  }
  return "unknown";
}

SnapshotMode parse_snapshot_mode(const std::string& s) {
  if (s == "random_iterate") return SnapshotMode::RandomIterate;
  if (s == "average") return SnapshotMode::Average;
  if (s == "last") return SnapshotMode::Last;
  throw InvalidArgument("unknown snapshot mode '" + s + "'");
}

SolverKind parse_solver_kind(const std::string& s) {
  if (s == "zor_svrg") return SolverKind::ZorSvrg;
  if (s == "zor_saga") return SolverKind::ZorSaga;
  if (s == "rspgf") return SolverKind::Rspgf;
  if (s == "zo_svrg_coord") return SolverKind::ZoSvrgCoord;
  throw InvalidArgument("unknown solver '" + s + "'");
}

namespace {

bool is_svrg_kind(SolverKind kind) { return kind == SolverKind::ZorSvrg || kind == SolverKind::ZoSvrgCoord; }

constexpr double kDivergenceNorm = 1e8;

double now_s() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

// Checkpointing, budget bookkeeping and the divergence guard shared by every solver.
class Recorder {
 public:
  Recorder(const BlackBoxProblem& problem, const SolverConfig& config, QueryLedger& ledger, SolverKind kind)
      : problem_(problem), config_(config), ledger_(ledger) {
    trace_.algorithm = to_string(kind);
    trace_.snapshot_mode = config.snapshot;
  }

  void start(const Vector& x0) {
    require(static_cast<std::size_t>(x0.size()) == problem_.d(), "solver: x0 has wrong dimension");
    require(x0.allFinite(), "solver: x0 is not finite");
    push(x0, 0);
  }

  bool affordable(std::uint64_t cost) const {
    const std::uint64_t used = ledger_.total();
    if (used > config_.fqc_budget) return false;
    return cost <= config_.fqc_budget - used;
  }

  void exhausted() { trace_.budget_exhausted = true; }

  void guard(const Vector& x, std::size_t epoch) {
    if (!x.allFinite() || x.norm() > kDivergenceNorm) {
      fail("iterate diverged at epoch " + std::to_string(epoch));
    }
  }

  // natural: the solver reached its default checkpoint boundary
  void maybe_checkpoint(const Vector& x, std::size_t epoch, bool natural) {
    const std::uint64_t since = ledger_.total() - trace_.checkpoints.back().fqc;
    const bool due = config_.checkpoint_every == 0 ? natural : since >= config_.checkpoint_every;
    if (due) push(x, epoch);
  }

  RunTrace finish(Vector output, std::optional<Vector> snapshot, const Vector& last_point, std::size_t epoch,
                  std::size_t units) {
    push(last_point, epoch);
    trace_.output = std::move(output);
    trace_.snapshot_output = std::move(snapshot);
    trace_.units_completed = units;
    return std::move(trace_);
  }

 private:
  void push(const Vector& x, std::size_t epoch) {
    const std::uint64_t fqc = ledger_.total();
    if (!trace_.checkpoints.empty() && fqc <= trace_.checkpoints.back().fqc) return;
    const double obj = problem_.diagnostic_objective(x);
    if (!std::isfinite(obj)) fail("objective is not finite at epoch " + std::to_string(epoch));
    Checkpoint cp;
    cp.fqc = fqc;
    cp.objective = obj;
    cp.epoch = epoch;
    cp.x = x;
    cp.clock_s = now_s();
    trace_.checkpoints.push_back(std::move(cp));
  }

  [[noreturn]] void fail(const std::string& what) {
    RunTrace partial = trace_;
    if (!partial.checkpoints.empty()) partial.output = partial.checkpoints.back().x;
    throw SolverDivergence(trace_.algorithm + ": " + what, std::move(partial));
  }

  const BlackBoxProblem& problem_;
  const SolverConfig& config_;
  QueryLedger& ledger_;
  RunTrace trace_;
};

RunTrace svrg_impl(SolverKind kind, const BlackBoxProblem& problem, const SolverConfig& config,
                   const Vector& x0, Rng& rng, QueryLedger& ledger) {
  config.validate(problem.meta(), kind);
  const bool coordinated = kind == SolverKind::ZoSvrgCoord;
  const double mu = config.mu.value_or(default_mu(problem.d()));
  const std::uint64_t epoch_cost = svrg_epoch_cost(kind, problem.n(), problem.d(), config.b, config.m);

  Recorder rec(problem, config, ledger, kind);
  rec.start(x0);

  Vector snapshot = x0;
  Vector last = x0;
  std::size_t s = 0;
  std::uniform_int_distribution<std::size_t> pick_k(0, config.m - 1);
  for (; s < config.epochs; ++s) {
    if (!rec.affordable(epoch_cost)) {
      rec.exhausted();
      break;
    }
    const Vector full = coordinated ? full_coord_est(problem, snapshot, mu, ledger)
                                    : full_rand_est(problem, snapshot, mu, rng, ledger);
    const std::size_t snap_k = config.snapshot == SnapshotMode::RandomIterate ? pick_k(rng) : 0;

    Vector x = snapshot;
    Vector chosen = snapshot;
    Vector sum = Vector::Zero(x.size());
    for (std::size_t k = 0; k < config.m; ++k) {
      if (k == snap_k) chosen = x;
      const auto batch = sample_batch(problem.n(), config.b, rng);
      const PairEstimate pair = coordinated ? batch_pair_coord_est(problem, batch, x, snapshot, mu, ledger)
                                            : batch_pair_est(problem, batch, x, snapshot, mu, rng, ledger);
      const Vector correction = pair.at_x - pair.at_y;
      const Vector v = correction + full;
      if (config.on_iteration) config.on_iteration({s, k, x, full, correction, v});
      x = prox_step(x, v, config.eta, problem.regularizer());
      rec.guard(x, s + 1);
      sum += x;
    }
    last = x;
    switch (config.snapshot) {
      case SnapshotMode::RandomIterate:
        snapshot = chosen;
        break;
      case SnapshotMode::Average:
        snapshot = sum / static_cast<double>(config.m);
        break;
      case SnapshotMode::Last:
        snapshot = x;
        break;
    }
    rec.maybe_checkpoint(snapshot, s + 1, true);
  }
  return rec.finish(last, snapshot, snapshot, s, s);
}

std::size_t natural_interval(std::size_t n, std::size_t b) { return std::max<std::size_t>(1, (n + b - 1) / b); }

}  // namespace

void SolverConfig::validate(const ProblemMeta& meta, SolverKind kind) const {
  require(eta > 0.0 && std::isfinite(eta), "solver config: eta must be positive");
  require(b >= 1, "solver config: batch size must be at least 1");
  if (is_svrg_kind(kind)) require(m >= 1, "solver config: inner-loop length m must be at least 1");
  if (mu) require(*mu > 0.0, "solver config: mu must be positive");
  if (mode == ParamMode::Theory) require(eta <= 1.0 / meta.L, "solver config: theory mode needs eta <= 1/L");
}

RunTrace zor_prox_svrg(const BlackBoxProblem& problem, const SolverConfig& config, const Vector& x0,
                       Rng& rng, QueryLedger& ledger) {
  return svrg_impl(SolverKind::ZorSvrg, problem, config, x0, rng, ledger);
}

RunTrace zo_prox_svrg_coord(const BlackBoxProblem& problem, const SolverConfig& config, const Vector& x0,
                            Rng& rng, QueryLedger& ledger) {
  return svrg_impl(SolverKind::ZoSvrgCoord, problem, config, x0, rng, ledger);
}

RunTrace zor_prox_saga(const BlackBoxProblem& problem, const SolverConfig& config, const Vector& x0,
                       Rng& rng, QueryLedger& ledger) {
  config.validate(problem.meta(), SolverKind::ZorSaga);
  const double mu = config.mu.value_or(default_mu(problem.d()));
  const std::size_t n = problem.n();
  const std::size_t interval = natural_interval(n, config.b);

  Recorder rec(problem, config, ledger, SolverKind::ZorSaga);
  rec.start(x0);
  if (!rec.affordable(2 * static_cast<std::uint64_t>(n))) {
    rec.exhausted();
    return rec.finish(x0, std::nullopt, x0, 0, 0);
  }

  // table of points, not gradients: re-estimation at phi_i needs the point
  std::vector<Vector> phi(n, x0);
  Vector g = full_rand_est(problem, x0, mu, rng, ledger);
  Vector x = x0;
  const double weight = static_cast<double>(config.b) / static_cast<double>(n);
  const std::uint64_t step_cost = 4 * static_cast<std::uint64_t>(config.b);

  std::size_t k = 0;
  for (; k < config.epochs; ++k) {
    if (!rec.affordable(step_cost)) {
      rec.exhausted();
      break;
    }
    const auto batch = sample_batch(n, config.b, rng);
    Vector correction = Vector::Zero(x.size());
    for (std::size_t i : batch) {
      const Vector u = sample_sphere(problem.d(), rng);
      const PairEstimate pe = pair_est(problem, i, x, phi[i], mu, u, ledger);
      correction += pe.at_x - pe.at_y;
    }
    correction /= static_cast<double>(config.b);
    const Vector v = correction + g;
    if (config.on_iteration) config.on_iteration({k / interval, k, x, g, correction, v});

    Vector next = prox_step(x, v, config.eta, problem.regularizer());
    for (std::size_t i : batch) phi[i] = x;
    g += weight * correction;
    x = std::move(next);
    rec.guard(x, k / interval);
    rec.maybe_checkpoint(x, (k + 1) / interval, (k + 1) % interval == 0);
  }
  return rec.finish(x, std::nullopt, x, k / interval, k);
}

RunTrace rspgf_baseline(const BlackBoxProblem& problem, const SolverConfig& config, const Vector& x0,
                        Rng& rng, QueryLedger& ledger) {
  config.validate(problem.meta(), SolverKind::Rspgf);
  const double mu = config.mu.value_or(default_mu(problem.d()));
  const std::size_t interval = natural_interval(problem.n(), config.b);
  const std::uint64_t step_cost = 2 * static_cast<std::uint64_t>(config.b);

  Recorder rec(problem, config, ledger, SolverKind::Rspgf);
  rec.start(x0);
  Vector x = x0;
  const Vector zero = Vector::Zero(x.size());
  std::size_t k = 0;
  for (; k < config.epochs; ++k) {
    if (!rec.affordable(step_cost)) {
      rec.exhausted();
      break;
    }
    const auto batch = sample_batch(problem.n(), config.b, rng);
    Vector g = Vector::Zero(x.size());
    for (std::size_t i : batch) {
      const Vector u = sample_sphere(problem.d(), rng);
      g += rand_est(problem, i, x, mu, u, ledger);
    }
    g /= static_cast<double>(config.b);
    if (config.on_iteration) config.on_iteration({k / interval, k, x, zero, g, g});
    x = prox_step(x, g, config.eta, problem.regularizer());
    rec.guard(x, k / interval);
    rec.maybe_checkpoint(x, (k + 1) / interval, (k + 1) % interval == 0);
  }
  return rec.finish(x, std::nullopt, x, k / interval, k);
}

RunTrace run_solver(SolverKind kind, const BlackBoxProblem& problem, const SolverConfig& config,
                    const Vector& x0, Rng& rng, QueryLedger& ledger) {
  switch (kind) {
    case SolverKind::ZorSvrg:
      return zor_prox_svrg(problem, config, x0, rng, ledger);
    case SolverKind::ZorSaga:
      return zor_prox_saga(problem, config, x0, rng, ledger);
    case SolverKind::Rspgf:
      return rspgf_baseline(problem, config, x0, rng, ledger);
    case SolverKind::ZoSvrgCoord:
      return zo_prox_svrg_coord(problem, config, x0, rng, ledger);
  }
  throw InvalidArgument("run_solver: unknown solver kind");
}

const Vector& zood_output(const RunTrace& trace) {
  return trace.snapshot_output ? *trace.snapshot_output : trace.output;
}

namespace {

// ceil that ignores representation noise, e.g. 190*5/0.01 = 95000.000000000015
std::size_t stable_ceil(double v) {
  const double r = std::round(v);
  if (std::abs(v - r) <= 1e-9 * std::max(1.0, std::abs(v))) return static_cast<std::size_t>(r);
  return static_cast<std::size_t>(std::ceil(v));
}

}  // namespace

SvrgParams svrg_theory_params(double L, double gamma, std::size_t d, std::size_t n) {
  require(L > 0.0, "svrg_theory_params: L must be positive");
  require(gamma > 0.0, "svrg_theory_params: strong convexity gamma > 0 is required");
  require(d >= 1, "svrg_theory_params: d must be at least 1");
  (void)n;
  const double dd = static_cast<double>(d);
  SvrgParams p;
  p.eta = 3.0 / (170.0 * dd * L);
  p.b = 25;
  p.m = std::max<std::size_t>(1, stable_ceil(190.0 * dd * L / gamma));
  return p;
}

SagaParams saga_theory_params(double L, double gamma, std::size_t d, std::size_t n) {
  require(L > 0.0, "saga_theory_params: L must be positive");
  require(gamma > 0.0, "saga_theory_params: strong convexity gamma > 0 is required");
  require(d >= 1 && n >= 1, "saga_theory_params: d and n must be at least 1");
  SagaParams p;
  p.eta = std::min(1.0 / (95.0 * static_cast<double>(d) * L), 2.0 / (3.0 * static_cast<double>(n) * gamma));
  p.b = 6;
  return p;
}

SolverConfig tuned_config(SolverKind kind, const BlackBoxProblem& problem, std::size_t epochs) {
  SolverConfig c;
  c.mode = ParamMode::Tuned;
  c.eta = 0.1 / problem.meta().L;
  c.b = std::min<std::size_t>(problem.n(), 10);
  c.m = natural_interval(problem.n(), c.b);
  c.epochs = epochs;
  (void)kind;
  return c;
}

std::uint64_t svrg_epoch_cost(SolverKind kind, std::size_t n, std::size_t d, std::size_t b, std::size_t m) {
  const std::uint64_t base = 2 * static_cast<std::uint64_t>(n) + 4 * static_cast<std::uint64_t>(b) * m;
  return kind == SolverKind::ZoSvrgCoord ? base * d : base;
}

}  // namespace zoprox
