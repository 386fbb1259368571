#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "zoprox/problem.hpp"

namespace fixtures {

using zoprox::BlackBoxProblem;
using zoprox::ProblemMeta;
using zoprox::Regularizer;
using zoprox::Vector;

/// f_i(x) = 0.5 x' diag(h_i) x + g_i' x
struct Quadratic {
  std::vector<Vector> h;
  std::vector<Vector> g;

  double value(std::size_t i, const Vector& x) const {
    return 0.5 * (h[i].array() * x.array().square()).sum() + g[i].dot(x);
  }
  Vector grad(std::size_t i, const Vector& x) const { return (h[i].array() * x.array()).matrix() + g[i]; }
};

inline Quadratic random_quadratic(std::size_t n, std::size_t d, std::uint64_t seed, double hmin = 0.5,
                                  double hmax = 2.0) {
  zoprox::Rng rng(seed);
  std::uniform_real_distribution<double> uh(hmin, hmax), ug(-1.0, 1.0);
  Quadratic q;
  for (std::size_t i = 0; i < n; ++i) {
    Vector h(d), g(d);
    for (std::size_t j = 0; j < d; ++j) {
      h[j] = uh(rng);
      g[j] = ug(rng);
    }
    q.h.push_back(h);
    q.g.push_back(g);
  }
  return q;
}

inline BlackBoxProblem make_quadratic_problem(const Quadratic& q, Regularizer reg = Regularizer::none()) {
  double L = 0.0, gamma = 1e300;
  for (const auto& h : q.h) {
    L = std::max(L, h.maxCoeff());
    gamma = std::min(gamma, h.minCoeff());
  }
  ProblemMeta meta;
  meta.L = L;
  meta.gamma = gamma;
  meta.convexity = zoprox::ConvexityTag::StronglyConvex;
  auto shared = std::make_shared<Quadratic>(q);
  return BlackBoxProblem(
      q.h.size(), static_cast<std::size_t>(q.h[0].size()),
      [shared](std::size_t i, const Vector& x) { return shared->value(i, x); }, reg, meta,
      [shared](std::size_t i, const Vector& x) { return shared->grad(i, x); });
}

/// every component is 0.5 ||x||^2
inline BlackBoxProblem half_norm_sq(std::size_t n, std::size_t d, Regularizer reg = Regularizer::none()) {
  ProblemMeta meta;
  meta.L = 1.0;
  meta.gamma = 1.0;
  meta.convexity = zoprox::ConvexityTag::StronglyConvex;
  return BlackBoxProblem(
      n, d, [](std::size_t, const Vector& x) { return 0.5 * x.squaredNorm(); }, reg, meta,
      [](std::size_t, const Vector& x) { return Vector(x); });
}

/// f_i(x) = a_i' x
inline BlackBoxProblem linear(std::vector<Vector> a, Regularizer reg = Regularizer::none()) {
  ProblemMeta meta;
  meta.L = 1.0;
  auto shared = std::make_shared<std::vector<Vector>>(std::move(a));
  const std::size_t n = shared->size();
  const auto d = static_cast<std::size_t>((*shared)[0].size());
  return BlackBoxProblem(
      n, d, [shared](std::size_t i, const Vector& x) { return (*shared)[i].dot(x); }, reg, meta,
      [shared](std::size_t i, const Vector&) { return (*shared)[i]; });
}

/// zero oracle, used to isolate augmentation terms
inline BlackBoxProblem zero_problem(std::size_t n, std::size_t d) {
  ProblemMeta meta;
  meta.L = 1.0;
  return BlackBoxProblem(
      n, d, [](std::size_t, const Vector&) { return 0.0; }, Regularizer::none(), meta,
      [d](std::size_t, const Vector&) { return Vector(Vector::Zero(static_cast<Eigen::Index>(d))); });
}

inline Vector vec(std::initializer_list<double> v) {
  Vector x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index k = 0;
  for (double e : v) x[k++] = e;
  return x;
}

inline Vector random_vector(std::size_t d, zoprox::Rng& rng, double scale = 1.0) {
  std::normal_distribution<double> nd(0.0, scale);
  Vector x(static_cast<Eigen::Index>(d));
  for (Eigen::Index j = 0; j < x.size(); ++j) x[j] = nd(rng);
  return x;
}

/// central finite-difference gradient of a scalar function
inline Vector fd_gradient(const std::function<double(const Vector&)>& f, const Vector& x, double h = 1e-6) {
  Vector g(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    Vector a = x, b = x;
    a[j] += h;
    b[j] -= h;
    g[j] = (f(a) - f(b)) / (2 * h);
  }
  return g;
}

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

}  // namespace fixtures
