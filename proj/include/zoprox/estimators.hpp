#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "zoprox/problem.hpp"

namespace zoprox {

/// Smoothing parameter used when none is configured: 1e-3 / d.
inline double default_mu(std::size_t d) { return 1e-3 / static_cast<double>(d); }

/// Uniform direction on the unit sphere in R^d (normalized Gaussian).
Vector sample_sphere(std::size_t d, Rng& rng);
/// Uniform point in the unit ball: sphere direction scaled by U^{1/d}.
Vector sample_ball(std::size_t d, Rng& rng);
/// b indices drawn uniformly from [0, n) with replacement.
std::vector<std::size_t> sample_batch(std::size_t n, std::size_t b, Rng& rng);

/// Two-point random estimator (d/mu)[f_i(x + mu u) - f_i(x)] u. Two queries.
Vector rand_est(const BlackBoxProblem& problem, std::size_t i, const Vector& x, double mu,
                const Vector& u, QueryLedger& ledger);

/// Central differences along all coordinate axes. 2d queries.
Vector coord_est(const BlackBoxProblem& problem, std::size_t i, const Vector& x, double mu,
                 QueryLedger& ledger);

/// (1/n) sum_i rand_est(i, x) with a fresh direction per component. 2n queries.
Vector full_rand_est(const BlackBoxProblem& problem, const Vector& x, double mu, Rng& rng,
                     QueryLedger& ledger);

/// (1/n) sum_i coord_est(i, x). 2dn queries.
Vector full_coord_est(const BlackBoxProblem& problem, const Vector& x, double mu, QueryLedger& ledger);

struct PairEstimate {
  Vector at_x;
  Vector at_y;
};

/// Random estimates of f_i at x and y sharing one direction u. Four queries.
PairEstimate pair_est(const BlackBoxProblem& problem, std::size_t i, const Vector& x, const Vector& y,
                      double mu, const Vector& u, QueryLedger& ledger);

/// Minibatch averages of pair_est over `batch`, one fresh direction per
/// sample, shared between the two points. 4b queries.
PairEstimate batch_pair_est(const BlackBoxProblem& problem, std::span<const std::size_t> batch,
                            const Vector& x, const Vector& y, double mu, Rng& rng, QueryLedger& ledger);

/// Same as batch_pair_est with coordinated estimates. 4db queries.
PairEstimate batch_pair_coord_est(const BlackBoxProblem& problem, std::span<const std::size_t> batch,
                                  const Vector& x, const Vector& y, double mu, QueryLedger& ledger);

struct SmoothedValue {
  double estimate = 0.0;
  double std_error = 0.0;
};

/// Monte Carlo estimate of f_mu(x) = E_{u ~ ball}[f(x + mu u)] with its
/// standard error. N * n queries.
SmoothedValue mc_smoothed_value(const BlackBoxProblem& problem, const Vector& x, double mu,
                                std::size_t samples, Rng& rng, QueryLedger& ledger);

}  // namespace zoprox
