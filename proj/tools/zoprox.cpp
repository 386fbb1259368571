#include <charconv>
#include <cmath>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "zoprox/bench.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitAbort = 3;

// accepts "1000", "2e5", "1.5e4"
std::uint64_t parse_count(const std::string& tok) {
  std::uint64_t v = 0;
  const char* end = tok.data() + tok.size();
  if (auto r = std::from_chars(tok.data(), end, v); r.ec == std::errc() && r.ptr == end) return v;
  double d = 0.0;
  if (auto r = std::from_chars(tok.data(), end, d); r.ec == std::errc() && r.ptr == end && d >= 0.0 &&
                                                    d == std::floor(d) && d < 1.8e19) {
    return static_cast<std::uint64_t>(d);
  }
  throw zoprox::ConfigError({"'" + tok + "' is not a nonnegative integer"});
}

std::vector<std::uint64_t> parse_list(const std::string& s) {
  std::vector<std::uint64_t> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const std::size_t comma = std::min(s.find(',', start), s.size());
    const std::string tok = s.substr(start, comma - start);
    if (!tok.empty()) out.push_back(parse_count(tok));
    start = comma + 1;
  }
  return out;
}

int cmd_run(const std::string& config_path, const std::string& algo, const std::string& budget,
            const std::string& seeds, const std::string& out) {
  zoprox::ExperimentConfig cfg = zoprox::load_config(config_path);
  if (!algo.empty()) cfg.algorithms = {algo};
  if (!budget.empty()) cfg.fqc_budget = parse_count(budget);
  if (!seeds.empty()) cfg.seeds = parse_list(seeds);
  if (!out.empty()) cfg.output_dir = out;
  const zoprox::ExperimentResult res = zoprox::run_experiment(cfg);
  for (const auto& f : res.files) {
    std::cout << f.path.string() << "  rows=" << f.rows;
    if (f.aborted) std::cout << "  ABORTED: " << f.error;
    std::cout << '\n';
  }
  std::cout << res.manifest.string() << '\n';
  return res.any_aborted() ? kExitAbort : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"zoprox: zeroth-order proximal variance-reduced solvers"};
  app.require_subcommand(1);

  std::string config, algo, budget, seeds, out;
  auto* run = app.add_subcommand("run", "run an experiment config and write CSV traces");
  run->add_option("--config", config, "JSON experiment config")->required();
  run->add_option("--algo", algo, "algorithm id, overrides the config");
  run->add_option("--budget", budget, "fqc budget, overrides the config");
  run->add_option("--seeds", seeds, "comma-separated seeds, overrides the config");
  run->add_option("--out", out, "output directory, overrides the config");

  std::string dir_a, dir_b, budgets;
  auto* compare = app.add_subcommand("compare", "compare two trace directories");
  compare->add_option("--a", dir_a, "first trace directory")->required();
  compare->add_option("--b", dir_b, "second trace directory")->required();
  compare->add_option("--budgets", budgets, "comma-separated fqc budgets")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) return cmd_run(config, algo, budget, seeds, out);
    const auto summary = zoprox::compare_traces(dir_a, dir_b, parse_list(budgets));
    std::cout << summary.table();
    return 0;
  } catch (const zoprox::ConfigError& e) {
    std::cerr << "config error:\n";
    for (const auto& f : e.fields()) std::cerr << "  " << f << '\n';
    return kExitConfig;
  } catch (const zoprox::CompareError& e) {
    std::cerr << "compare: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitAbort;
  }
}
