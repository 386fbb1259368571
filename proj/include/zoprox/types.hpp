#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace zoprox {

using Vector = Eigen::VectorXd;
using Rng = std::mt19937_64;

/// Violated precondition on a public entry point (bad index, non-finite input,
/// out-of-range hyperparameter).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A component oracle returned something unusable (NaN, inf).
class OracleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Requested operation needs a capability the problem does not expose,
/// e.g. white-box gradients.
class UnsupportedMode : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Iterative subproblem did not reach its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what + " (residual " + std::to_string(residual) + ")"),
        residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw InvalidArgument(msg);
}

}  // namespace zoprox
