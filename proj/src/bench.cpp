#include "zoprox/bench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "zoprox/dataset.hpp"

namespace zoprox {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::string shortest(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double now_s() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::runtime_error("invalid config: " + join(problems, "; ")), fields_(std::move(problems)) {}

std::string AlgorithmId::str() const {
  switch (family) {
    case Family::Plain:
      return to_string(solver);
    case Family::AdaptC:
      return "adaptc+" + to_string(solver);
    case Family::AdaptNC:
      return "adaptnc+" + to_string(solver);
  }
  return to_string(solver);
}

AlgorithmId parse_algorithm_id(const std::string& s) {
  AlgorithmId id;
  std::string rest = s;
  if (const auto plus = s.find('+'); plus != std::string::npos) {
    const std::string head = s.substr(0, plus);
    rest = s.substr(plus + 1);
    if (head == "adaptc") {
      id.family = AlgorithmId::Family::AdaptC;
    } else if (head == "adaptnc") {
      id.family = AlgorithmId::Family::AdaptNC;
    } else {
      throw InvalidArgument("unknown reduction '" + head + "'");
    }
  }
  id.solver = parse_solver_kind(rest);
  return id;
}

// ---------------------------------------------------------------- config

void ExperimentConfig::validate() const {
  std::vector<std::string> bad;
  if (fqc_budget == 0) bad.push_back("fqc_budget: must be positive");
  if (seeds.empty()) bad.push_back("seeds: at least one seed is required");
  if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size()) {
    bad.push_back("seeds: duplicate seed");
  }
  if (algorithms.empty()) bad.push_back("algorithm: at least one algorithm is required");
  const auto& lg = problem.logistic;
  if (!(lg.lambda1 >= 0.0) || !std::isfinite(lg.lambda1)) bad.push_back("problem.logistic.lambda1: must be >= 0");
  if (!(lg.lambda2 >= 0.0) || !std::isfinite(lg.lambda2)) bad.push_back("problem.logistic.lambda2: must be >= 0");
  if (!(lg.alpha >= 0.0) || !std::isfinite(lg.alpha)) bad.push_back("problem.logistic.alpha: must be >= 0");
  if (!(problem.strong_convexity >= 0.0)) bad.push_back("problem.strong_convexity: must be >= 0");
  if (problem.dataset.empty()) {
    if (problem.synthetic.n < 1) bad.push_back("problem.synthetic.n: must be >= 1");
    if (problem.synthetic.d < 1) bad.push_back("problem.synthetic.d: must be >= 1");
    if (!(problem.synthetic.separability >= 0.0)) bad.push_back("problem.synthetic.separability: must be >= 0");
  }
  if (eta && !(*eta > 0.0 && std::isfinite(*eta))) bad.push_back("solver.eta: must be positive");
  if (b && *b < 1) bad.push_back("solver.b: must be >= 1");
  if (m && *m < 1) bad.push_back("solver.m: must be >= 1");
  if (epochs && *epochs < 1) bad.push_back("solver.epochs: must be >= 1");
  if (mu && !(*mu > 0.0 && std::isfinite(*mu))) bad.push_back("solver.mu: must be positive");
  if (!(gamma0 > 0.0)) bad.push_back("reduction.gamma0: must be positive");
  if (!(contraction > 0.0 && contraction < 1.0)) bad.push_back("reduction.contraction: must lie in (0, 1)");
  if (!(sigma > 0.0)) bad.push_back("reduction.sigma: must be positive");
  if (stages < 1) bad.push_back("reduction.stages: must be >= 1");
  if (epochs_per_stage < 1) bad.push_back("reduction.epochs_per_stage: must be >= 1");
  if (switch_threshold && !(*switch_threshold >= 0.0)) bad.push_back("reduction.switch_threshold: must be >= 0");

  const bool convex = problem.logistic.alpha == 0.0;
  for (const auto& a : algorithms) {
    AlgorithmId id;
    try {
      id = parse_algorithm_id(a);
    } catch (const std::exception& e) {
      bad.push_back("algorithm: '" + a + "': " + e.what());
      continue;
    }
    if (id.family == AlgorithmId::Family::AdaptC && !convex) {
      bad.push_back("algorithm: '" + a + "' needs a convex problem (problem.logistic.alpha = 0)");
    }
    if (mode == ParamMode::Theory) {
      if (id.solver == SolverKind::Rspgf && id.family != AlgorithmId::Family::Plain) {
        bad.push_back("algorithm: '" + a + "' has no theory parameters for rspgf as an inner solver");
      }
      if (id.family == AlgorithmId::Family::Plain && id.solver != SolverKind::Rspgf && problem.strong_convexity <= 0.0) {
        bad.push_back("mode: theory parameters for '" + a + "' need problem.strong_convexity > 0");
      }
    }
  }
  if (!bad.empty()) throw ConfigError(std::move(bad));
}

namespace {

// Reads an object field by field, collecting every problem instead of
// stopping at the first.
class Reader {
 public:
  Reader(const json& j, std::string prefix, std::vector<std::string>& bad)
      : j_(j), prefix_(std::move(prefix)), bad_(bad) {
    if (!j_.is_object()) bad_.push_back(name("") + ": expected an object");
  }

  bool has(const std::string& key) const { return j_.is_object() && j_.contains(key); }

  template <class T>
  void get(const std::string& key, T& out) {
    seen_.insert(key);
    if (!has(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception&) {
      bad_.push_back(name(key) + ": wrong type");
    }
  }

  template <class T>
  void get(const std::string& key, std::optional<T>& out) {
    seen_.insert(key);
    if (!has(key) || j_.at(key).is_null()) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception&) {
      bad_.push_back(name(key) + ": wrong type");
    }
  }

  void get_count(const std::string& key, std::size_t& out) {
    seen_.insert(key);
    if (!has(key)) return;
    const json& v = j_.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) {
      bad_.push_back(name(key) + ": expected a nonnegative integer");
      return;
    }
    out = v.get<std::size_t>();
  }

  void get_u64(const std::string& key, std::uint64_t& out) {
    seen_.insert(key);
    if (!has(key)) return;
    const json& v = j_.at(key);
    if (v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0)) {
      out = v.get<std::uint64_t>();
    } else if (v.is_number_float() && v.get<double>() >= 0.0 && v.get<double>() == std::floor(v.get<double>()) &&
               v.get<double>() < 1.8e19) {
      out = static_cast<std::uint64_t>(v.get<double>());  // allows 2e5
    } else {
      bad_.push_back(name(key) + ": expected a nonnegative integer");
    }
  }

  Reader child(const std::string& key) {
    seen_.insert(key);
    static const json empty = json::object();
    return Reader(has(key) ? j_.at(key) : empty, name(key), bad_);
  }

  void mark(const std::string& key) { seen_.insert(key); }
  const json& raw(const std::string& key) const { return j_.at(key); }
  std::string name(const std::string& key) const {
    if (key.empty()) return prefix_.empty() ? "config" : prefix_;
    return prefix_.empty() ? key : prefix_ + "." + key;
  }
  void bad(const std::string& msg) { bad_.push_back(msg); }

  void finish() {
    if (!j_.is_object()) return;
    for (const auto& [k, v] : j_.items()) {
      if (!seen_.count(k)) bad_.push_back(name(k) + ": unknown field");
    }
  }

 private:
  const json& j_;
  std::string prefix_;
  std::vector<std::string>& bad_;
  std::set<std::string> seen_;
};

}  // namespace

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig cfg;
  std::vector<std::string> bad;
  Reader top(j, "", bad);

  {
    Reader p = top.child("problem");
    p.get("dataset", cfg.problem.dataset);
    std::optional<std::size_t> dd;
    p.get("declared_d", dd);
    cfg.problem.declared_d = dd;
    p.get("strong_convexity", cfg.problem.strong_convexity);
    Reader s = p.child("synthetic");
    s.get_count("n", cfg.problem.synthetic.n);
    s.get_count("d", cfg.problem.synthetic.d);
    s.get_u64("seed", cfg.problem.synthetic.seed);
    s.mark("separability");
    if (s.has("separability")) {
      const json& v = s.raw("separability");
      if (v.is_number()) {
        cfg.problem.synthetic.separability = v.get<double>();
      } else if (v.is_string() && (v.get<std::string>() == "inf" || v.get<std::string>() == "infinity")) {
        cfg.problem.synthetic.separability = std::numeric_limits<double>::infinity();
      } else {
        s.bad(s.name("separability") + ": expected a number or \"inf\"");
      }
    }
    s.finish();
    Reader l = p.child("logistic");
    l.get("lambda1", cfg.problem.logistic.lambda1);
    l.get("lambda2", cfg.problem.logistic.lambda2);
    l.get("alpha", cfg.problem.logistic.alpha);
    l.finish();
    p.finish();
  }

  for (const char* key : {"algorithm", "algorithms"}) {
    top.mark(key);
    if (!top.has(key)) continue;
    const json& v = top.raw(key);
    if (v.is_string()) {
      cfg.algorithms = {v.get<std::string>()};
    } else if (v.is_array() && std::all_of(v.begin(), v.end(), [](const json& e) { return e.is_string(); })) {
      cfg.algorithms = v.get<std::vector<std::string>>();
    } else {
      bad.push_back(std::string(key) + ": expected a string or a list of strings");
    }
  }

  top.mark("mode");
  if (top.has("mode")) {
    const json& v = top.raw("mode");
    if (v == "tuned") {
      cfg.mode = ParamMode::Tuned;
    } else if (v == "theory") {
      cfg.mode = ParamMode::Theory;
    } else {
      bad.push_back("mode: expected \"tuned\" or \"theory\"");
    }
  }

  {
    Reader s = top.child("solver");
    s.get("eta", cfg.eta);
    std::optional<std::size_t> b, m, e;
    s.get("b", b);
    s.get("m", m);
    s.get("epochs", e);
    cfg.b = b;
    cfg.m = m;
    cfg.epochs = e;
    s.get("mu", cfg.mu);
    s.mark("snapshot");
    if (s.has("snapshot")) {
      try {
        cfg.snapshot = parse_snapshot_mode(s.raw("snapshot").get<std::string>());
      } catch (const std::exception&) {
        bad.push_back("solver.snapshot: expected random_iterate, average or last");
      }
    }
    s.finish();
  }

  {
    Reader r = top.child("reduction");
    r.get("gamma0", cfg.gamma0);
    r.get("contraction", cfg.contraction);
    r.get("sigma", cfg.sigma);
    r.get_count("stages", cfg.stages);
    r.get("switch_threshold", cfg.switch_threshold);
    r.get("fallback", cfg.fallback);
    r.get_count("epochs_per_stage", cfg.epochs_per_stage);
    r.finish();
  }

  top.get_u64("fqc_budget", cfg.fqc_budget);
  top.mark("seeds");
  if (top.has("seeds")) {
    const json& v = top.raw("seeds");
    if (v.is_array() && std::all_of(v.begin(), v.end(), [](const json& e) { return e.is_number_unsigned(); })) {
      cfg.seeds = v.get<std::vector<std::uint64_t>>();
    } else {
      bad.push_back("seeds: expected a list of nonnegative integers");
    }
  }
  top.get_u64("checkpoint_every", cfg.checkpoint_every);
  top.get("output_dir", cfg.output_dir);
  top.get_count("threads", cfg.threads);
  top.finish();

  if (!bad.empty()) throw ConfigError(std::move(bad));
  return cfg;
}

json config_to_json(const ExperimentConfig& cfg) {
  auto opt = [](const auto& o) -> json { return o ? json(*o) : json(nullptr); };
  json problem = {
      {"dataset", cfg.problem.dataset},
      {"declared_d", opt(cfg.problem.declared_d)},
      {"strong_convexity", cfg.problem.strong_convexity},
      {"logistic",
       {{"lambda1", cfg.problem.logistic.lambda1},
        {"lambda2", cfg.problem.logistic.lambda2},
        {"alpha", cfg.problem.logistic.alpha}}},
  };
  const double sep = cfg.problem.synthetic.separability;
  problem["synthetic"] = {{"n", cfg.problem.synthetic.n},
                          {"d", cfg.problem.synthetic.d},
                          {"seed", cfg.problem.synthetic.seed},
                          {"separability", std::isinf(sep) ? json("inf") : json(sep)}};
  return {
      {"problem", problem},
      {"algorithm", cfg.algorithms},
      {"mode", cfg.mode == ParamMode::Theory ? "theory" : "tuned"},
      {"solver",
       {{"eta", opt(cfg.eta)},
        {"b", opt(cfg.b)},
        {"m", opt(cfg.m)},
        {"epochs", opt(cfg.epochs)},
        {"mu", opt(cfg.mu)},
        {"snapshot", to_string(cfg.snapshot)}}},
      {"reduction",
       {{"gamma0", cfg.gamma0},
        {"contraction", cfg.contraction},
        {"sigma", cfg.sigma},
        {"stages", cfg.stages},
        {"switch_threshold", opt(cfg.switch_threshold)},
        {"fallback", cfg.fallback},
        {"epochs_per_stage", cfg.epochs_per_stage}}},
      {"fqc_budget", cfg.fqc_budget},
      {"seeds", cfg.seeds},
      {"checkpoint_every", cfg.checkpoint_every},
      {"output_dir", cfg.output_dir},
      {"threads", cfg.threads},
  };
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"config: cannot open '" + path.string() + "'"});
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError({std::string("config: malformed JSON: ") + e.what()});
  }
  return config_from_json(j);
}

fs::path resolve_dataset_path(const std::string& path) {
  fs::path p(path);
  if (fs::exists(p) || p.is_absolute()) return p;
  if (const char* dir = std::getenv("ZOPROX_DATA_DIR"); dir && *dir) {
    fs::path alt = fs::path(dir) / p;
    if (fs::exists(alt)) return alt;
  }
  return p;
}

BlackBoxProblem build_problem(const ProblemSpec& spec) {
  Dataset data = spec.dataset.empty()
                     ? synth_dataset(spec.synthetic.n, spec.synthetic.d, spec.synthetic.seed, spec.synthetic.separability)
                     : read_libsvm_file(resolve_dataset_path(spec.dataset).string(), spec.declared_d);
  BlackBoxProblem p = spec.logistic.alpha > 0.0 ? make_nc_logistic(data, spec.logistic) : make_logistic(data, spec.logistic);
  if (spec.strong_convexity > 0.0) p = p.augment_quadratic(spec.strong_convexity, Vector::Zero(p.d()));
  return p;
}

// ---------------------------------------------------------------- runs

namespace {

constexpr std::size_t kUntilBudget = std::numeric_limits<std::size_t>::max();

bool is_iteration_solver(SolverKind k) { return k == SolverKind::ZorSaga || k == SolverKind::Rspgf; }

void apply_overrides(const ExperimentConfig& cfg, SolverConfig& c) {
  if (cfg.eta) c.eta = *cfg.eta;
  if (cfg.b) c.b = *cfg.b;
  if (cfg.m) c.m = *cfg.m;
  c.mu = cfg.mu;
  c.snapshot = cfg.snapshot;
  c.checkpoint_every = cfg.checkpoint_every;
}

SolverConfig plain_config(const ExperimentConfig& cfg, SolverKind kind, const BlackBoxProblem& problem) {
  const std::size_t epochs = cfg.epochs.value_or(kUntilBudget);
  SolverConfig c;
  if (cfg.mode == ParamMode::Theory && kind != SolverKind::Rspgf) {
    const auto& meta = problem.meta();
    c.mode = ParamMode::Theory;
    if (kind == SolverKind::ZorSaga) {
      const SagaParams p = saga_theory_params(meta.L, meta.gamma, problem.d(), problem.n());
      c.eta = p.eta;
      c.b = p.b;
      c.m = std::max<std::size_t>(1, (problem.n() + p.b - 1) / p.b);
    } else {
      const SvrgParams p = svrg_theory_params(meta.L, meta.gamma, problem.d(), problem.n());
      c.eta = p.eta;
      c.b = p.b;
      c.m = p.m;
    }
    c.epochs = epochs;
  } else {
    c = tuned_config(kind, problem, epochs);
  }
  apply_overrides(cfg, c);
  c.fqc_budget = cfg.fqc_budget;
  return c;
}

InnerSolver bench_inner(const ExperimentConfig& cfg, SolverKind kind) {
  return [cfg, kind](const InnerRequest& req, Rng& rng, QueryLedger& ledger) {
    const BlackBoxProblem& p = req.problem;
    SolverConfig c;
    if (cfg.mode == ParamMode::Theory) {
      c = inner_budget(kind, cfg.contraction, p.meta().L, req.strong_convexity, p.d(), p.n());
    } else {
      c = tuned_config(kind, p, cfg.epochs_per_stage);
      if (is_iteration_solver(kind)) c.epochs = cfg.epochs_per_stage * c.m;
    }
    apply_overrides(cfg, c);
    c.fqc_budget = req.fqc_budget;
    return run_solver(kind, p, c, req.start, rng, ledger);
  };
}

FallbackConfig fallback_config(const ExperimentConfig& cfg) {
  FallbackConfig fb;
  fb.enabled = cfg.fallback;
  fb.mu = cfg.mu;
  return fb;
}

}  // namespace

RunTrace run_algorithm(const ExperimentConfig& cfg, const AlgorithmId& algo, const BlackBoxProblem& problem,
                       std::uint64_t seed, QueryLedger& ledger) {
  Rng rng(seed);
  const BlackBoxProblem blind = problem.benchmark_view();
  const Vector x0 = Vector::Zero(problem.d());
  switch (algo.family) {
    case AlgorithmId::Family::Plain:
      return run_solver(algo.solver, blind, plain_config(cfg, algo.solver, blind), x0, rng, ledger);
    case AlgorithmId::Family::AdaptC: {
      ReductionConfigC rc;
      rc.gamma0 = cfg.gamma0;
      rc.contraction = cfg.contraction;
      rc.stages = cfg.stages;
      rc.switch_threshold = cfg.switch_threshold.value_or(kConvexSwitchThreshold);
      rc.fqc_budget = cfg.fqc_budget;
      rc.fallback = fallback_config(cfg);
      return adapt_rdct_c(blind, rc, bench_inner(cfg, algo.solver), x0, rng, ledger);
    }
    case AlgorithmId::Family::AdaptNC: {
      ReductionConfigNC rc;
      rc.sigma = cfg.sigma;
      rc.stages = cfg.stages;
      rc.switch_threshold = cfg.switch_threshold.value_or(kNonconvexSwitchThreshold);
      rc.fqc_budget = cfg.fqc_budget;
      rc.fallback = fallback_config(cfg);
      return adapt_rdct_nc(blind, rc, bench_inner(cfg, algo.solver), x0, rng, ledger);
    }
  }
  throw InvalidArgument("run_algorithm: unknown algorithm family");
}

std::string format_trace_row(const TraceRow& row) {
  char wall[32];
  std::snprintf(wall, sizeof(wall), "%.3f", row.wall_ms);
  std::string out = std::to_string(row.seed) + ',' + row.algorithm + ',' + row.stage + ',' + std::to_string(row.fqc) +
                    ',' + shortest(row.objective) + ',';
  if (row.grad_mapping_norm) out += shortest(*row.grad_mapping_norm);
  out += ',';
  out += wall;
  return out;
}

bool ExperimentResult::any_aborted() const {
  return std::any_of(files.begin(), files.end(), [](const TraceFile& f) { return f.aborted; });
}

namespace {

struct TaskOutput {
  std::vector<TraceRow> rows;
  bool aborted = false;
  std::string error;
  std::uint64_t final_fqc = 0;
};

std::vector<TraceRow> rows_from(const RunTrace& trace, const BlackBoxProblem& problem, std::uint64_t seed,
                                const std::string& name, double t0) {
  std::vector<TraceRow> rows;
  const double eta = 1.0 / problem.meta().L;
  for (const auto& cp : trace.checkpoints) {
    TraceRow r;
    r.seed = seed;
    r.algorithm = name;
    r.stage = std::to_string(cp.epoch);
    r.fqc = cp.fqc;
    r.objective = cp.objective;
    if (problem.has_whitebox()) {
      r.grad_mapping_norm = grad_mapping(cp.x, problem.smooth_gradient(cp.x), eta, problem.regularizer()).norm();
    }
    r.wall_ms = std::max(0.0, (cp.clock_s - t0) * 1e3);
    rows.push_back(std::move(r));
  }
  return rows;
}

TaskOutput run_task(const ExperimentConfig& cfg, const std::string& algo, std::uint64_t seed) {
  TaskOutput out;
  const BlackBoxProblem problem = build_problem(cfg.problem);
  const AlgorithmId id = parse_algorithm_id(algo);
  QueryLedger ledger;
  const double t0 = now_s();
  try {
    RunTrace trace = run_algorithm(cfg, id, problem, seed, ledger);
    out.rows = rows_from(trace, problem, seed, algo, t0);
    out.final_fqc = trace.final_fqc();
  } catch (const SolverDivergence& e) {
    out.rows = rows_from(e.partial(), problem, seed, algo, t0);
    out.aborted = true;
    out.error = e.what();
  } catch (const std::exception& e) {
    out.aborted = true;
    out.error = e.what();
  }
  if (out.aborted) {
    TraceRow err;
    err.seed = seed;
    err.algorithm = algo;
    err.stage = "error";
    err.fqc = ledger.total();
    err.objective = std::numeric_limits<double>::quiet_NaN();
    err.wall_ms = (now_s() - t0) * 1e3;
    out.rows.push_back(err);
    out.final_fqc = ledger.total();
  }
  return out;
}

std::string file_name(const std::string& algo, std::uint64_t seed) {
  return algo + "_seed" + std::to_string(seed) + ".csv";
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  if (!cfg.problem.dataset.empty()) {
    const fs::path p = resolve_dataset_path(cfg.problem.dataset);
    if (!fs::exists(p)) throw ConfigError({"problem.dataset: cannot read '" + cfg.problem.dataset + "'"});
  }
  // surfaces dataset and problem errors before any thread starts
  const BlackBoxProblem probe = [&] {
    try {
      return build_problem(cfg.problem);
    } catch (const ParseError& e) {
      throw ConfigError({std::string("problem.dataset: ") + e.what()});
    } catch (const InvalidArgument& e) {
      throw ConfigError({std::string("problem: ") + e.what()});
    }
  }();

  struct Task {
    std::uint64_t seed;
    std::string algo;
  };
  std::vector<Task> tasks;
  for (auto seed : cfg.seeds)
    for (const auto& a : cfg.algorithms) tasks.push_back({seed, a});

  std::vector<TaskOutput> outputs(tasks.size());
  std::size_t workers = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, tasks.size());
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t t = next++; t < tasks.size(); t = next++) outputs[t] = run_task(cfg, tasks[t].algo, tasks[t].seed);
    });
  }
  for (auto& th : pool) th.join();

  const fs::path dir(cfg.output_dir);
  fs::create_directories(dir);
  ExperimentResult result;
  json traces = json::array();
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    TraceFile f;
    f.seed = tasks[t].seed;
    f.algorithm = tasks[t].algo;
    f.path = dir / file_name(f.algorithm, f.seed);
    f.aborted = outputs[t].aborted;
    f.error = outputs[t].error;
    f.rows = outputs[t].rows.size();
    std::ofstream out(f.path);
    if (!out) throw std::runtime_error("cannot write '" + f.path.string() + "'");
    out << kTraceHeader << '\n';
    for (const auto& r : outputs[t].rows) out << format_trace_row(r) << '\n';
    traces.push_back({{"file", f.path.filename().string()},
                      {"seed", f.seed},
                      {"algorithm", f.algorithm},
                      {"status", f.aborted ? "aborted" : "ok"},
                      {"error", f.error},
                      {"final_fqc", outputs[t].final_fqc}});
    result.files.push_back(std::move(f));
  }

  json manifest = {
      {"library_version", kLibraryVersion},
      {"config", config_to_json(cfg)},
      {"seeds", cfg.seeds},
      {"problem_summary",
       {{"n", probe.n()},
        {"d", probe.d()},
        {"L", probe.meta().L},
        {"gamma", probe.meta().gamma},
        {"sigma", probe.meta().sigma},
        {"convexity", to_string(probe.meta().convexity)},
        {"regularizer", probe.regularizer().name()}}},
      {"traces", traces},
  };
  result.manifest = dir / "manifest.json";
  std::ofstream mf(result.manifest);
  mf << manifest.dump(2) << '\n';
  return result;
}

// ---------------------------------------------------------------- compare

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

Winner winner_of(double a, double b) {
  if (a < b) return Winner::A;
  if (b < a) return Winner::B;
  return Winner::Tie;
}

std::optional<json> read_manifest(const fs::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) return std::nullopt;
  try {
    return json::parse(in);
  } catch (const json::exception&) {
    throw CompareError("malformed manifest in '" + dir.string() + "'");
  }
}

}  // namespace

std::vector<LoadedTrace> load_trace_dir(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw CompareError("'" + dir.string() + "' is not a directory");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".csv") files.push_back(e.path());
  std::sort(files.begin(), files.end());

  std::map<std::pair<std::uint64_t, std::string>, LoadedTrace> groups;
  for (const auto& path : files) {
    std::ifstream in(path);
    std::string line;
    if (!std::getline(in, line) || line != kTraceHeader) {
      throw CompareError("'" + path.string() + "': trace header mismatch");
    }
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      const auto cells = split_csv(line);
      if (cells.size() != 7) throw CompareError(path.string() + ":" + std::to_string(lineno) + ": expected 7 columns");
      std::uint64_t seed = 0;
      std::from_chars(cells[0].data(), cells[0].data() + cells[0].size(), seed);
      LoadedTrace& t = groups[{seed, cells[1]}];
      t.seed = seed;
      t.algorithm = cells[1];
      if (cells[2] == "error") {
        t.aborted = true;
        continue;
      }
      std::uint64_t fqc = 0;
      double obj = 0.0;
      const auto r1 = std::from_chars(cells[3].data(), cells[3].data() + cells[3].size(), fqc);
      const auto r2 = std::from_chars(cells[4].data(), cells[4].data() + cells[4].size(), obj);
      if (r1.ec != std::errc() || r2.ec != std::errc()) {
        throw CompareError(path.string() + ":" + std::to_string(lineno) + ": malformed fqc or objective");
      }
      if (!t.fqc.empty() && fqc < t.fqc.back()) {
        throw CompareError(path.string() + ":" + std::to_string(lineno) + ": fqc decreases");
      }
      t.fqc.push_back(fqc);
      t.objective.push_back(obj);
    }
  }
  std::vector<LoadedTrace> out;
  for (auto& [k, t] : groups)
    if (!t.fqc.empty()) out.push_back(std::move(t));
  return out;
}

double value_at(const LoadedTrace& trace, std::uint64_t budget) {
  require(!trace.fqc.empty(), "value_at: empty trace");
  const auto it = std::upper_bound(trace.fqc.begin(), trace.fqc.end(), budget);
  if (it == trace.fqc.begin()) return trace.objective.front();
  return trace.objective[static_cast<std::size_t>(it - trace.fqc.begin()) - 1];
}

double trace_auc(const LoadedTrace& trace, std::uint64_t upper) {
  require(!trace.fqc.empty(), "trace_auc: empty trace");
  require(upper >= 1, "trace_auc: upper limit must be at least 1");
  const double hi = std::log(static_cast<double>(upper));
  double area = 0.0;
  double lo = 0.0;  // log(1)
  double value = value_at(trace, 1);
  for (std::size_t i = 0; i < trace.fqc.size(); ++i) {
    if (trace.fqc[i] <= 1) continue;
    const double at = std::log(static_cast<double>(trace.fqc[i]));
    if (at >= hi) break;
    area += value * (at - lo);
    lo = at;
    value = trace.objective[i];
  }
  area += value * (hi - lo);
  return area;
}

std::string to_string(Winner w) {
  switch (w) {
    case Winner::A:
      return "A";
    case Winner::B:
      return "B";
    case Winner::Tie:
      return "tie";
  }
  return "tie";
}

std::string ComparisonSummary::table() const {
  std::ostringstream os;
  for (const auto& p : pairs) {
    os << "A=" << p.algorithm_a << "  B=" << p.algorithm_b << "  seeds=" << p.seeds_compared << '\n';
    os << "budget,median_a,median_b,winner\n";
    for (const auto& pt : p.points) {
      os << pt.budget << ',' << shortest(pt.median_a) << ',' << shortest(pt.median_b) << ',' << to_string(pt.winner)
         << '\n';
    }
    os << "auc_a=" << shortest(p.auc_a) << "  auc_b=" << shortest(p.auc_b) << "  seed_auc_wins A:" << p.seed_auc_wins_a
       << " B:" << p.seed_auc_wins_b << '\n';
  }
  return os.str();
}

ComparisonSummary compare_traces(const fs::path& dir_a, const fs::path& dir_b,
                                 const std::vector<std::uint64_t>& budgets) {
  if (budgets.empty()) throw CompareError("compare: empty budget grid");
  if (std::any_of(budgets.begin(), budgets.end(), [](std::uint64_t b) { return b == 0; })) {
    throw CompareError("compare: budgets must be positive");
  }
  const auto ma = read_manifest(dir_a);
  const auto mb = read_manifest(dir_b);
  if (ma && mb) {
    const json pa = ma->value("config", json::object()).value("problem", json::object());
    const json pb = mb->value("config", json::object()).value("problem", json::object());
    if (pa != pb) {
      throw CompareError("compare: traces come from different problems:\n  A: " + pa.dump() + "\n  B: " + pb.dump());
    }
  }

  const auto ta = load_trace_dir(dir_a);
  const auto tb = load_trace_dir(dir_b);
  if (ta.empty() || tb.empty()) throw CompareError("compare: no traces found");

  std::map<std::string, std::vector<const LoadedTrace*>> ga, gb;
  for (const auto& t : ta) ga[t.algorithm].push_back(&t);
  for (const auto& t : tb) gb[t.algorithm].push_back(&t);

  std::vector<std::pair<std::string, std::string>> pairs;
  for (const auto& [name, v] : ga)
    if (gb.count(name)) pairs.emplace_back(name, name);
  if (pairs.empty()) {
    if (ga.size() != 1 || gb.size() != 1) {
      throw CompareError("compare: the directories share no algorithm and hold more than one each");
    }
    pairs.emplace_back(ga.begin()->first, gb.begin()->first);
  }

  const std::uint64_t upper = *std::max_element(budgets.begin(), budgets.end());
  ComparisonSummary summary;
  for (const auto& [na, nb] : pairs) {
    AlgorithmComparison cmp;
    cmp.algorithm_a = na;
    cmp.algorithm_b = nb;
    const auto& va = ga.at(na);
    const auto& vb = gb.at(nb);
    for (auto budget : budgets) {
      std::vector<double> a, b;
      for (const auto* t : va) a.push_back(value_at(*t, budget));
      for (const auto* t : vb) b.push_back(value_at(*t, budget));
      BudgetComparison pt;
      pt.budget = budget;
      pt.median_a = median(a);
      pt.median_b = median(b);
      pt.winner = winner_of(pt.median_a, pt.median_b);
      cmp.points.push_back(pt);
    }
    std::vector<double> auc_a, auc_b;
    std::map<std::uint64_t, double> seed_b;
    for (const auto* t : va) auc_a.push_back(trace_auc(*t, upper));
    for (const auto* t : vb) {
      auc_b.push_back(trace_auc(*t, upper));
      seed_b[t->seed] = auc_b.back();
    }
    cmp.auc_a = median(auc_a);
    cmp.auc_b = median(auc_b);
    for (std::size_t i = 0; i < va.size(); ++i) {
      const auto it = seed_b.find(va[i]->seed);
      if (it == seed_b.end()) continue;
      ++cmp.seeds_compared;
      const Winner w = winner_of(auc_a[i], it->second);
      if (w == Winner::A) ++cmp.seed_auc_wins_a;
      if (w == Winner::B) ++cmp.seed_auc_wins_b;
    }
    summary.pairs.push_back(std::move(cmp));
  }
  return summary;
}

}  // namespace zoprox
