#include "zoprox/reductions.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace zoprox {

SolverConfig inner_budget(SolverKind kind, double contraction, double L, double gamma, std::size_t d,
                          std::size_t n) {
  require(contraction > 0.0 && contraction < 1.0, "inner_budget: contraction must lie in (0, 1)");
  SolverConfig c;
  c.mode = ParamMode::Theory;
  switch (kind) {
    case SolverKind::ZorSvrg:
    case SolverKind::ZoSvrgCoord: {
      const SvrgParams p = svrg_theory_params(L, gamma, d, n);
      c.eta = p.eta;
      c.b = p.b;
      c.m = p.m;
      // (3/4)^T <= K; the epsilon keeps exact powers such as K = 9/16 at T = 2
      const double t = std::log(contraction) / std::log(0.75);
      c.epochs = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(t - 1e-9)));
      return c;
    }
    case SolverKind::ZorSaga: {
      const SagaParams p = saga_theory_params(L, gamma, d, n);
      c.eta = p.eta;
      c.b = p.b;
      const double eta = p.eta;
      const double b = static_cast<double>(p.b);
      const double nn = static_cast<double>(n);
      const double cc = 96.0 * eta * eta * nn * static_cast<double>(d) * L / (b * (2.0 * b - eta * nn * gamma));
      const double prefactor = (2.0 / gamma + 2.0 * eta + cc) / (2.0 * eta);
      const double q = 1.0 - eta * gamma / 2.0;
      std::size_t k = 0;
      if (prefactor > contraction) {
        const double guess = std::log(contraction / prefactor) / std::log(q);
        if (!(guess <= static_cast<double>(kSagaIterationCap))) {
          throw InvalidArgument("inner_budget: contraction unattainable within the SAGA iteration cap");
        }
        k = static_cast<std::size_t>(std::ceil(guess));
        // settle rounding in the closed form against the recurrence itself
        while (prefactor * std::pow(q, static_cast<double>(k)) > contraction) ++k;
        while (k > 0 && prefactor * std::pow(q, static_cast<double>(k - 1)) <= contraction) --k;
      }
      if (k > kSagaIterationCap) {
        throw InvalidArgument("inner_budget: contraction unattainable within the SAGA iteration cap");
      }
      c.epochs = k;
      return c;
    }
    case SolverKind::Rspgf:
      break;
  }
  throw InvalidArgument("inner_budget: " + to_string(kind) + " has no ZOOD parameterization");
}

InnerSolver make_inner_solver(SolverKind kind, ParamMode mode, double contraction, std::size_t epochs_per_stage,
                              std::optional<double> mu) {
  return [=](const InnerRequest& req, Rng& rng, QueryLedger& ledger) {
    const BlackBoxProblem& p = req.problem;
    SolverConfig cfg;
    if (mode == ParamMode::Theory) {
      cfg = inner_budget(kind, contraction, p.meta().L, req.strong_convexity, p.d(), p.n());
    } else {
      cfg = tuned_config(kind, p, epochs_per_stage);
      if (kind == SolverKind::ZorSaga || kind == SolverKind::Rspgf) cfg.epochs = epochs_per_stage * cfg.m;
    }
    cfg.mu = mu;
    cfg.fqc_budget = req.fqc_budget;
    return run_solver(kind, p, cfg, req.start, rng, ledger);
  };
}

SwitchDecision switch_orchestrator(std::span<const double> stage_objectives, double threshold,
                                   SolverKind fallback) {
  require(stage_objectives.size() >= 2, "switch_orchestrator: need at least two stage objectives");
  SwitchDecision d;
  d.fallback = fallback;
  d.after_stage = stage_objectives.size() - 1;
  d.improvement = stage_objectives[stage_objectives.size() - 2] - stage_objectives.back();
  d.switch_now = d.improvement < threshold;
  return d;
}

void ReductionConfigC::validate() const {
  require(gamma0 > 0.0, "adapt_rdct_c: gamma0 must be positive");
  require(contraction > 0.0 && contraction < 1.0, "adapt_rdct_c: contraction must lie in (0, 1)");
  require(stages >= 1, "adapt_rdct_c: need at least one stage");
  require(switch_threshold >= 0.0, "adapt_rdct_c: switch threshold must be nonnegative");
}

void ReductionConfigNC::validate() const {
  require(sigma > 0.0, "adapt_rdct_nc: sigma must be positive");
  require(stages >= 1, "adapt_rdct_nc: need at least one stage");
  require(switch_threshold >= 0.0, "adapt_rdct_nc: switch threshold must be nonnegative");
}

namespace {

double now_s() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
}

// Stitches inner-run checkpoints into the reduction trace, re-scored on the
// original objective.
class StageLog {
 public:
  StageLog(const BlackBoxProblem& original, std::string name, QueryLedger& ledger)
      : original_(original), ledger_(ledger) {
    trace_.algorithm = std::move(name);
  }

  void start(const Vector& x0) {
    require(static_cast<std::size_t>(x0.size()) == original_.d(), "reduction: x0 has wrong dimension");
    require(x0.allFinite(), "reduction: x0 is not finite");
    add(x0, 0, ledger_.total(), now_s(), false);
    objectives_.push_back(trace_.checkpoints.back().objective);
  }

  void merge(const RunTrace& sub, std::size_t stage, bool fallback) {
    for (const auto& cp : sub.checkpoints) add(cp.x, stage + (fallback ? cp.epoch : 0), cp.fqc, cp.clock_s, fallback);
  }

  double stage_done(StageRecord rec) {
    rec.objective = original_.diagnostic_objective(rec.output);
    rec.fqc_end = ledger_.total();
    objectives_.push_back(rec.objective);
    trace_.stages.push_back(std::move(rec));
    return objectives_.back();
  }

  std::span<const double> objectives() const { return objectives_; }
  RunTrace& trace() { return trace_; }

  [[noreturn]] void rethrow(const SolverDivergence& e, std::size_t stage) {
    merge(e.partial(), stage, false);
    RunTrace partial = trace_;
    partial.output = partial.checkpoints.back().x;
    throw SolverDivergence(trace_.algorithm + ": stage " + std::to_string(stage) + ": " + e.what(),
                           std::move(partial));
  }

 private:
  void add(const Vector& x, std::size_t stage, std::uint64_t fqc, double clock, bool fallback) {
    if (!trace_.checkpoints.empty() && fqc <= trace_.checkpoints.back().fqc) return;
    Checkpoint cp;
    cp.fqc = fqc;
    cp.objective = original_.diagnostic_objective(x);
    cp.epoch = stage;
    cp.x = x;
    cp.clock_s = clock;
    if (fallback) cp.extra["fallback"] = 1.0;
    trace_.checkpoints.push_back(std::move(cp));
  }

  const BlackBoxProblem& original_;
  QueryLedger& ledger_;
  RunTrace trace_;
  std::vector<double> objectives_;
};

std::string inner_name(const RunTrace& sub) { return sub.algorithm.empty() ? "inner" : sub.algorithm; }

// Hands the remaining budget to the fallback solver on the original problem.
Vector run_fallback(const BlackBoxProblem& problem, const FallbackConfig& fb, std::uint64_t budget,
                    const Vector& start, std::size_t stage, StageLog& log, Rng& rng, QueryLedger& ledger) {
  const std::size_t epochs = budget == kUnlimitedBudget ? fb.epochs_without_budget : static_cast<std::size_t>(-1);
  SolverConfig cfg = tuned_config(fb.kind, problem, epochs);
  if (fb.kind == SolverKind::ZorSaga || fb.kind == SolverKind::Rspgf) {
    cfg.epochs = budget == kUnlimitedBudget ? epochs * cfg.m : epochs;
  }
  cfg.mu = fb.mu;
  cfg.fqc_budget = budget;
  try {
    RunTrace sub = run_solver(fb.kind, problem, cfg, start, rng, ledger);
    log.merge(sub, stage, true);
    if (sub.budget_exhausted) log.trace().budget_exhausted = true;
    return zood_output(sub);
  } catch (const SolverDivergence& e) {
    log.rethrow(e, stage);
  }
}

}  // namespace

RunTrace adapt_rdct_c(const BlackBoxProblem& problem, const ReductionConfigC& cfg, const InnerSolver& inner,
                      const Vector& x0, Rng& rng, QueryLedger& ledger) {
  cfg.validate();
  require(problem.meta().convexity != ConvexityTag::WeaklyConvex, "adapt_rdct_c: problem must be convex");
  require(static_cast<bool>(inner), "adapt_rdct_c: inner solver is empty");

  StageLog log(problem, "adaptc", ledger);
  log.start(x0);
  const double root_k = std::sqrt(cfg.contraction);

  Vector x = x0;
  double gamma = cfg.gamma0;
  bool named = false;
  for (std::size_t s = 0; s < cfg.stages; ++s) {
    if (ledger.total() >= cfg.fqc_budget) {
      log.trace().budget_exhausted = true;
      break;
    }
    const BlackBoxProblem stage_problem = problem.augment_quadratic(gamma, x0);
    RunTrace sub;
    try {
      sub = inner({stage_problem, gamma, x, cfg.fqc_budget}, rng, ledger);
    } catch (const SolverDivergence& e) {
      log.rethrow(e, s);
    }
    if (!named) {
      log.trace().algorithm = "adaptc+" + inner_name(sub);
      named = true;
    }
    log.merge(sub, s, false);
    if (sub.units_completed == 0) {
      log.trace().budget_exhausted = true;
      break;
    }
    StageRecord rec;
    rec.index = s;
    rec.coeff = gamma;
    rec.anchor = x0;
    rec.start = x;
    rec.output = zood_output(sub);
    rec.strong_convexity = stage_problem.meta().gamma;
    rec.inner_epochs = sub.units_completed;
    x = rec.output;
    log.stage_done(std::move(rec));
    gamma *= root_k;

    const SwitchDecision decision = switch_orchestrator(log.objectives(), cfg.switch_threshold, cfg.fallback.kind);
    if (decision.switch_now && cfg.fallback.enabled) {
      log.trace().switch_stage = s;
      x = run_fallback(problem, cfg.fallback, cfg.fqc_budget, x, s + 1, log, rng, ledger);
      break;
    }
  }
  RunTrace& trace = log.trace();
  trace.output = x;
  trace.units_completed = trace.stages.size();
  return std::move(trace);
}

RunTrace adapt_rdct_nc(const BlackBoxProblem& problem, const ReductionConfigNC& cfg, const InnerSolver& inner,
                       const Vector& x0, Rng& rng, QueryLedger& ledger) {
  cfg.validate();
  require(problem.meta().sigma <= problem.meta().L, "adapt_rdct_nc: sigma must not exceed L");
  require(static_cast<bool>(inner), "adapt_rdct_nc: inner solver is empty");

  StageLog log(problem, "adaptnc", ledger);
  log.start(x0);
  log.trace().moving_anchor = true;

  Vector x_prev = x0;
  std::optional<Vector> fallback_out;
  bool named = false;
  for (std::size_t s = 1; s <= cfg.stages; ++s) {
    if (ledger.total() >= cfg.fqc_budget) {
      log.trace().budget_exhausted = true;
      break;
    }
    // sigma ||x - x_{s-1}||^2 == (2 sigma / 2) ||x - x_{s-1}||^2
    const BlackBoxProblem stage_problem = problem.augment_quadratic(2.0 * cfg.sigma, x_prev);
    RunTrace sub;
    try {
      sub = inner({stage_problem, cfg.sigma, x_prev, cfg.fqc_budget}, rng, ledger);
    } catch (const SolverDivergence& e) {
      log.rethrow(e, s);
    }
    if (!named) {
      log.trace().algorithm = "adaptnc+" + inner_name(sub);
      named = true;
    }
    log.merge(sub, s, false);
    if (sub.units_completed == 0) {
      log.trace().budget_exhausted = true;
      break;
    }
    StageRecord rec;
    rec.index = s;
    rec.coeff = 2.0 * cfg.sigma;
    rec.anchor = x_prev;
    rec.start = x_prev;
    rec.output = zood_output(sub);
    rec.strong_convexity = stage_problem.meta().gamma;
    rec.inner_epochs = sub.units_completed;
    x_prev = rec.output;
    log.stage_done(std::move(rec));

    const SwitchDecision decision = switch_orchestrator(log.objectives(), cfg.switch_threshold, cfg.fallback.kind);
    if (decision.switch_now && cfg.fallback.enabled) {
      log.trace().switch_stage = s;
      fallback_out = run_fallback(problem, cfg.fallback, cfg.fqc_budget, x_prev, s + 1, log, rng, ledger);
      break;
    }
  }

  RunTrace& trace = log.trace();
  trace.units_completed = trace.stages.size();
  if (trace.stages.empty()) {
    trace.output = x0;
    return std::move(trace);
  }
  std::uniform_int_distribution<std::size_t> pick(0, trace.stages.size() - 1);
  trace.alpha_index = pick(rng);
  trace.output = fallback_out ? *fallback_out : trace.stages[*trace.alpha_index].output;
  return std::move(trace);
}

}  // namespace zoprox
