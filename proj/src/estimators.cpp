#include "zoprox/estimators.hpp"

#include <cmath>

namespace zoprox {

namespace {

double checked(double v, const char* where) {
  if (!std::isfinite(v)) throw OracleError(std::string(where) + ": oracle returned a non-finite value");
  return v;
}

}  // namespace

Vector sample_sphere(std::size_t d, Rng& rng) {
  require(d >= 1, "sample_sphere: dimension must be at least 1");
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector u(static_cast<Eigen::Index>(d));
  double norm = 0.0;
  // a zero draw has probability zero but would divide by zero
  while (norm == 0.0) {
    for (Eigen::Index j = 0; j < u.size(); ++j) u[j] = normal(rng);
    norm = u.norm();
  }
  return u / norm;
}

Vector sample_ball(std::size_t d, Rng& rng) {
  Vector u = sample_sphere(d, rng);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  return u * std::pow(unif(rng), 1.0 / static_cast<double>(d));
}

std::vector<std::size_t> sample_batch(std::size_t n, std::size_t b, Rng& rng) {
  require(n >= 1, "sample_batch: empty population");
  require(b >= 1, "sample_batch: batch must be nonempty");
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::vector<std::size_t> batch(b);
  for (auto& i : batch) i = pick(rng);
  return batch;
}

Vector rand_est(const BlackBoxProblem& problem, std::size_t i, const Vector& x, double mu,
                const Vector& u, QueryLedger& ledger) {
  require(mu > 0.0, "rand_est: mu must be positive");
  require(static_cast<std::size_t>(u.size()) == problem.d(), "rand_est: direction has wrong dimension");
  require(std::abs(u.norm() - 1.0) <= 1e-9, "rand_est: direction must have unit norm");
  const double f_plus = checked(problem.eval_component(i, x + mu * u, ledger), "rand_est");
  const double f_base = checked(problem.eval_component(i, x, ledger), "rand_est");
  const double scale = static_cast<double>(problem.d()) / mu * (f_plus - f_base);
  return scale * u;
}

Vector coord_est(const BlackBoxProblem& problem, std::size_t i, const Vector& x, double mu,
                 QueryLedger& ledger) {
  require(mu > 0.0, "coord_est: mu must be positive");
  const auto d = static_cast<Eigen::Index>(problem.d());
  Vector g(d);
  Vector probe = x;
  for (Eigen::Index j = 0; j < d; ++j) {
    probe[j] = x[j] + mu;
    const double f_plus = checked(problem.eval_component(i, probe, ledger), "coord_est");
    probe[j] = x[j] - mu;
    const double f_minus = checked(problem.eval_component(i, probe, ledger), "coord_est");
    probe[j] = x[j];
    g[j] = (f_plus - f_minus) / (2.0 * mu);
  }
  return g;
}

Vector full_rand_est(const BlackBoxProblem& problem, const Vector& x, double mu, Rng& rng,
                     QueryLedger& ledger) {
  Vector g = Vector::Zero(static_cast<Eigen::Index>(problem.d()));
  for (std::size_t i = 0; i < problem.n(); ++i) {
    const Vector u = sample_sphere(problem.d(), rng);
    g += rand_est(problem, i, x, mu, u, ledger);
  }
  return g / static_cast<double>(problem.n());
}

Vector full_coord_est(const BlackBoxProblem& problem, const Vector& x, double mu, QueryLedger& ledger) {
  Vector g = Vector::Zero(static_cast<Eigen::Index>(problem.d()));
  for (std::size_t i = 0; i < problem.n(); ++i) g += coord_est(problem, i, x, mu, ledger);
  return g / static_cast<double>(problem.n());
}

PairEstimate pair_est(const BlackBoxProblem& problem, std::size_t i, const Vector& x, const Vector& y,
                      double mu, const Vector& u, QueryLedger& ledger) {
  return {rand_est(problem, i, x, mu, u, ledger), rand_est(problem, i, y, mu, u, ledger)};
}

PairEstimate batch_pair_est(const BlackBoxProblem& problem, std::span<const std::size_t> batch,
                            const Vector& x, const Vector& y, double mu, Rng& rng, QueryLedger& ledger) {
  require(!batch.empty(), "batch_pair_est: batch must be nonempty");
  const auto d = static_cast<Eigen::Index>(problem.d());
  PairEstimate out{Vector::Zero(d), Vector::Zero(d)};
  for (std::size_t i : batch) {
    const Vector u = sample_sphere(problem.d(), rng);
    out.at_x += rand_est(problem, i, x, mu, u, ledger);
    out.at_y += rand_est(problem, i, y, mu, u, ledger);
  }
  const auto b = static_cast<double>(batch.size());
  out.at_x /= b;
  out.at_y /= b;
  return out;
}

PairEstimate batch_pair_coord_est(const BlackBoxProblem& problem, std::span<const std::size_t> batch,
                                  const Vector& x, const Vector& y, double mu, QueryLedger& ledger) {
  require(!batch.empty(), "batch_pair_coord_est: batch must be nonempty");
  const auto d = static_cast<Eigen::Index>(problem.d());
  PairEstimate out{Vector::Zero(d), Vector::Zero(d)};
  for (std::size_t i : batch) {
    out.at_x += coord_est(problem, i, x, mu, ledger);
    out.at_y += coord_est(problem, i, y, mu, ledger);
  }
  const auto b = static_cast<double>(batch.size());
  out.at_x /= b;
  out.at_y /= b;
  return out;
}

SmoothedValue mc_smoothed_value(const BlackBoxProblem& problem, const Vector& x, double mu,
                                std::size_t samples, Rng& rng, QueryLedger& ledger) {
  require(samples >= 2, "mc_smoothed_value: need at least two samples");
  require(mu >= 0.0, "mc_smoothed_value: mu must be nonnegative");
  // Welford accumulation
  double mean = 0.0;
  double m2 = 0.0;
  for (std::size_t k = 0; k < samples; ++k) {
    const Vector u = sample_ball(problem.d(), rng);
    const double v = checked(problem.eval_smooth_avg(x + mu * u, ledger), "mc_smoothed_value");
    const double delta = v - mean;
    mean += delta / static_cast<double>(k + 1);
    m2 += delta * (v - mean);
  }
  const double var = m2 / static_cast<double>(samples - 1);
  return {mean, std::sqrt(var / static_cast<double>(samples))};
}

}  // namespace zoprox
