#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "zoprox/ledger.hpp"
#include "zoprox/prox.hpp"
#include "zoprox/types.hpp"

namespace zoprox {

enum class ConvexityTag { StronglyConvex, Convex, WeaklyConvex };

std::string to_string(ConvexityTag tag);

/// Analytic constants of the smooth part. gamma is the strong-convexity
/// constant of f (0 if none), sigma the weak-convexity constant (0 if convex).
struct ProblemMeta {
  double L = 1.0;
  double gamma = 0.0;
  double sigma = 0.0;
  ConvexityTag convexity = ConvexityTag::Convex;

  void validate() const;
};

/// (coeff/2) * ||x - anchor||^2, added analytically to every component.
struct QuadraticAugmentation {
  double coeff = 0.0;
  Vector anchor;

  double value(const Vector& x) const { return 0.5 * coeff * (x - anchor).squaredNorm(); }
};

using ComponentValueFn = std::function<double(std::size_t i, const Vector& x)>;
using ComponentGradientFn = std::function<Vector(std::size_t i, const Vector& x)>;

/// Finite-sum objective F(x) = (1/n) sum_i f_i(x) + r(x) behind value oracles.
///
/// Copies are cheap views: the oracles are shared and immutable, so an
/// augmented problem and its base hand the same callables to the same ledger.
/// The optional gradient channel exists for diagnostics and reference solves;
/// it never touches a ledger and can be switched off for benchmark runs.
class BlackBoxProblem {
 public:
  BlackBoxProblem(std::size_t n, std::size_t d, ComponentValueFn components, Regularizer reg,
                  ProblemMeta meta, ComponentGradientFn whitebox_grad = {});

  std::size_t n() const { return n_; }
  std::size_t d() const { return d_; }
  const Regularizer& regularizer() const { return reg_; }
  const ProblemMeta& meta() const { return meta_; }
  std::span<const QuadraticAugmentation> augmentations() const { return augmentations_; }

  /// f_i(x) plus every augmentation term; one query.
  double eval_component(std::size_t i, const Vector& x, QueryLedger& ledger) const;
  /// (1/n) sum_i f_i(x); n queries.
  double eval_smooth_avg(const Vector& x, QueryLedger& ledger) const;
  /// eval_smooth_avg + r(x). r is white-box and costs nothing.
  double objective(const Vector& x, QueryLedger& ledger) const;

  /// View with (coeff/2)||x - anchor||^2 added to every component.
  BlackBoxProblem augment_quadratic(double coeff, const Vector& anchor) const;

  /// Same oracles with the white-box channel disabled.
  BlackBoxProblem benchmark_view() const;
  /// Same oracles, constants replaced (e.g. a tighter sigma known to the caller).
  BlackBoxProblem with_meta(const ProblemMeta& meta) const;

  bool has_whitebox() const { return grad_ && static_cast<bool>(*grad_) && whitebox_enabled_; }
  /// Gradient of the augmented f_i. Throws UnsupportedMode without white-box access.
  Vector component_gradient(std::size_t i, const Vector& x) const;
  /// Gradient of the augmented smooth average.
  Vector smooth_gradient(const Vector& x) const;

  /// Unmetered evaluation path used for checkpoints and test oracles.
  double diagnostic_smooth_avg(const Vector& x) const;
  double diagnostic_objective(const Vector& x) const;

 private:
  double raw_component(std::size_t i, const Vector& x) const;
  double augmentation_value(const Vector& x) const;
  void check_point(const Vector& x) const;

  std::size_t n_;
  std::size_t d_;
  std::shared_ptr<const ComponentValueFn> components_;
  std::shared_ptr<const ComponentGradientFn> grad_;
  Regularizer reg_;
  ProblemMeta meta_;
  std::vector<QuadraticAugmentation> augmentations_;
  bool whitebox_enabled_ = true;
};

}  // namespace zoprox
