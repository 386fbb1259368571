#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "zoprox/logistic.hpp"
#include "zoprox/reductions.hpp"
#include "zoprox/solvers.hpp"

namespace zoprox {

inline constexpr const char* kLibraryVersion = "0.1.0";
inline constexpr const char* kTraceHeader = "seed,algorithm,stage,fqc,objective,grad_mapping_norm,wall_ms";

/// Validation failure; `fields()` names every offending config key.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& fields() const { return fields_; }

 private:
  std::vector<std::string> fields_;
};

struct SyntheticSpec {
  std::size_t n = 100;
  std::size_t d = 20;
  std::uint64_t seed = 1;
  double separability = 2.0;
};

struct ProblemSpec {
  /// LIBSVM path; empty selects the synthetic generator
  std::string dataset;
  std::optional<std::size_t> declared_d;
  SyntheticSpec synthetic;
  LogisticSpec logistic;
  /// gamma/2 ||x||^2 added to every component
  double strong_convexity = 0.0;
};

struct AlgorithmId {
  enum class Family { Plain, AdaptC, AdaptNC };
  Family family = Family::Plain;
  SolverKind solver = SolverKind::ZorSvrg;

  std::string str() const;
};

AlgorithmId parse_algorithm_id(const std::string& s);

struct ExperimentConfig {
  ProblemSpec problem;
  std::vector<std::string> algorithms = {"zor_svrg"};
  ParamMode mode = ParamMode::Tuned;

  // solver overrides on top of the tuned or theory defaults
  std::optional<double> eta;
  std::optional<std::size_t> b;
  std::optional<std::size_t> m;
  /// unset: run until the budget is spent
  std::optional<std::size_t> epochs;
  std::optional<double> mu;
  SnapshotMode snapshot = SnapshotMode::RandomIterate;

  // reductions
  double gamma0 = 5e-4;
  double contraction = 0.25;
  double sigma = 5e-4;
  std::size_t stages = 10;
  std::optional<double> switch_threshold;
  bool fallback = true;
  std::size_t epochs_per_stage = 2;

  std::uint64_t fqc_budget = 0;
  std::vector<std::uint64_t> seeds;
  /// query interval between checkpoints; 0 uses each solver's natural boundary
  std::uint64_t checkpoint_every = 0;
  std::string output_dir = "traces";
  /// worker threads; 0 picks hardware_concurrency
  std::size_t threads = 0;

  void validate() const;
};

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& cfg);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Relative dataset paths that do not exist are retried under $ZOPROX_DATA_DIR.
std::filesystem::path resolve_dataset_path(const std::string& path);

BlackBoxProblem build_problem(const ProblemSpec& spec);

struct TraceRow {
  std::uint64_t seed = 0;
  std::string algorithm;
  std::string stage;
  std::uint64_t fqc = 0;
  double objective = 0.0;
  std::optional<double> grad_mapping_norm;
  double wall_ms = 0.0;
};

std::string format_trace_row(const TraceRow& row);

/// Runs one (seed, algorithm) pair; the building block of run_experiment.
RunTrace run_algorithm(const ExperimentConfig& cfg, const AlgorithmId& algo, const BlackBoxProblem& problem,
                       std::uint64_t seed, QueryLedger& ledger);

struct TraceFile {
  std::filesystem::path path;
  std::uint64_t seed = 0;
  std::string algorithm;
  bool aborted = false;
  std::string error;
  std::size_t rows = 0;
};

struct ExperimentResult {
  std::vector<TraceFile> files;
  std::filesystem::path manifest;
  bool any_aborted() const;
};

/// One CSV per (seed, algorithm) plus manifest.json in cfg.output_dir.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

struct LoadedTrace {
  std::uint64_t seed = 0;
  std::string algorithm;
  std::vector<std::uint64_t> fqc;
  std::vector<double> objective;
  bool aborted = false;
};

std::vector<LoadedTrace> load_trace_dir(const std::filesystem::path& dir);

/// Objective of the last checkpoint at or below `budget` (the first one if
/// none is).
double value_at(const LoadedTrace& trace, std::uint64_t budget);

/// Integral of the step function over log(fqc), from fqc = 1 to `upper`.
double trace_auc(const LoadedTrace& trace, std::uint64_t upper);

enum class Winner { A, B, Tie };
std::string to_string(Winner w);

struct BudgetComparison {
  std::uint64_t budget = 0;
  double median_a = 0.0;
  double median_b = 0.0;
  Winner winner = Winner::Tie;
};

struct AlgorithmComparison {
  std::string algorithm_a;
  std::string algorithm_b;
  std::vector<BudgetComparison> points;
  double auc_a = 0.0;  // median over seeds
  double auc_b = 0.0;
  std::size_t seeds_compared = 0;
  std::size_t seed_auc_wins_a = 0;
  std::size_t seed_auc_wins_b = 0;
};

struct ComparisonSummary {
  std::vector<AlgorithmComparison> pairs;
  std::string table() const;
};

class CompareError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Pairs equal algorithm ids across the two directories, or the single
/// algorithm of each when they differ. Refuses when the manifests describe
/// different problems.
ComparisonSummary compare_traces(const std::filesystem::path& dir_a, const std::filesystem::path& dir_b,
                                 const std::vector<std::uint64_t>& budgets);

}  // namespace zoprox
