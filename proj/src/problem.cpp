#include "zoprox/problem.hpp"

#include <cmath>

namespace zoprox {

std::string to_string(ConvexityTag tag) {
  switch (tag) {
    case ConvexityTag::StronglyConvex:
      return "strongly_convex";
    case ConvexityTag::Convex:
      return "convex";
    case ConvexityTag::WeaklyConvex:
      return "weakly_convex";
  }
  return "unknown";
}

void ProblemMeta::validate() const {
  require(L > 0.0 && std::isfinite(L), "meta: L must be positive and finite");
  require(gamma >= 0.0 && sigma >= 0.0, "meta: gamma and sigma must be nonnegative");
  require(gamma <= L, "meta: gamma must not exceed L");
  require(sigma <= L, "meta: sigma must not exceed L");
  require(!(gamma > 0.0 && sigma > 0.0), "meta: gamma and sigma cannot both be positive");
  if (convexity == ConvexityTag::StronglyConvex) require(gamma > 0.0, "meta: strongly convex tag needs gamma > 0");
}

BlackBoxProblem::BlackBoxProblem(std::size_t n, std::size_t d, ComponentValueFn components,
                                 Regularizer reg, ProblemMeta meta, ComponentGradientFn whitebox_grad)
    : n_(n),
      d_(d),
      components_(std::make_shared<const ComponentValueFn>(std::move(components))),
      grad_(std::make_shared<const ComponentGradientFn>(std::move(whitebox_grad))),
      reg_(reg),
      meta_(meta) {
  require(n_ >= 1, "problem: need at least one component");
  require(d_ >= 1, "problem: dimension must be at least 1");
  require(static_cast<bool>(*components_), "problem: component oracle is empty");
  meta_.validate();
}

void BlackBoxProblem::check_point(const Vector& x) const {
  require(static_cast<std::size_t>(x.size()) == d_, "problem: point has wrong dimension");
  require(x.allFinite(), "problem: point is not finite");
}

double BlackBoxProblem::raw_component(std::size_t i, const Vector& x) const {
  require(i < n_, "problem: component index out of range");
  return (*components_)(i, x);
}

double BlackBoxProblem::augmentation_value(const Vector& x) const {
  double extra = 0.0;
  for (const auto& aug : augmentations_) extra += aug.value(x);
  return extra;
}

double BlackBoxProblem::eval_component(std::size_t i, const Vector& x, QueryLedger& ledger) const {
  check_point(x);
  const double v = raw_component(i, x);
  ledger.record(1);
  return v + augmentation_value(x);
}

double BlackBoxProblem::eval_smooth_avg(const Vector& x, QueryLedger& ledger) const {
  check_point(x);
  double sum = 0.0;
  for (std::size_t i = 0; i < n_; ++i) sum += raw_component(i, x);
  ledger.record(n_);
  return sum / static_cast<double>(n_) + augmentation_value(x);
}

double BlackBoxProblem::objective(const Vector& x, QueryLedger& ledger) const {
  return eval_smooth_avg(x, ledger) + reg_.value(x);
}

BlackBoxProblem BlackBoxProblem::augment_quadratic(double coeff, const Vector& anchor) const {
  require(coeff >= 0.0 && std::isfinite(coeff), "augment_quadratic: coefficient must be nonnegative");
  require(static_cast<std::size_t>(anchor.size()) == d_, "augment_quadratic: anchor has wrong dimension");
  require(anchor.allFinite(), "augment_quadratic: anchor is not finite");

  BlackBoxProblem out = *this;
  out.augmentations_.push_back({coeff, anchor});
  ProblemMeta& m = out.meta_;
  m.L += coeff;
  if (m.convexity == ConvexityTag::WeaklyConvex) {
    // curvature bounded below by -sigma, so adding coeff lifts it to coeff - sigma
    if (coeff > m.sigma) {
      m.gamma = coeff - m.sigma;
      m.sigma = 0.0;
      m.convexity = ConvexityTag::StronglyConvex;
    } else if (coeff == m.sigma) {
      m.sigma = 0.0;
      m.convexity = ConvexityTag::Convex;
    } else {
      m.sigma -= coeff;
    }
  } else {
    m.gamma += coeff;
    if (m.gamma > 0.0) m.convexity = ConvexityTag::StronglyConvex;
  }
  return out;
}

BlackBoxProblem BlackBoxProblem::benchmark_view() const {
  BlackBoxProblem out = *this;
  out.whitebox_enabled_ = false;
  return out;
}

BlackBoxProblem BlackBoxProblem::with_meta(const ProblemMeta& meta) const {
  meta.validate();
  BlackBoxProblem out = *this;
  out.meta_ = meta;
  return out;
}

Vector BlackBoxProblem::component_gradient(std::size_t i, const Vector& x) const {
  if (!has_whitebox()) throw UnsupportedMode("problem has no white-box gradient");
  check_point(x);
  require(i < n_, "problem: component index out of range");
  Vector g = (*grad_)(i, x);
  for (const auto& aug : augmentations_) g += aug.coeff * (x - aug.anchor);
  return g;
}

Vector BlackBoxProblem::smooth_gradient(const Vector& x) const {
  if (!has_whitebox()) throw UnsupportedMode("problem has no white-box gradient");
  check_point(x);
  Vector g = Vector::Zero(static_cast<Eigen::Index>(d_));
  for (std::size_t i = 0; i < n_; ++i) g += (*grad_)(i, x);
  g /= static_cast<double>(n_);
  for (const auto& aug : augmentations_) g += aug.coeff * (x - aug.anchor);
  return g;
}

double BlackBoxProblem::diagnostic_smooth_avg(const Vector& x) const {
  check_point(x);
  double sum = 0.0;
  for (std::size_t i = 0; i < n_; ++i) sum += raw_component(i, x);
  return sum / static_cast<double>(n_) + augmentation_value(x);
}

double BlackBoxProblem::diagnostic_objective(const Vector& x) const {
  return diagnostic_smooth_avg(x) + reg_.value(x);
}

}  // namespace zoprox
