#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <thread>

#include "fixtures.hpp"
#include "zoprox/dataset.hpp"
#include "zoprox/logistic.hpp"

using namespace zoprox;
using fixtures::vec;

TEST_CASE("eval_component returns f_i and charges one query") {
  const auto p = fixtures::half_norm_sq(3, 2);
  QueryLedger ledger;
  CHECK(p.eval_component(1, vec({1, 2}), ledger) == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(ledger.total() == 1);
}

TEST_CASE("augmented zero oracle returns the quadratic term") {
  const auto p = fixtures::zero_problem(1, 2).augment_quadratic(2.0, vec({0, 0}));
  QueryLedger ledger;
  CHECK(p.eval_component(0, vec({1, 0}), ledger) == 1.0);
  CHECK(ledger.total() == 1);

  const auto q = fixtures::zero_problem(1, 2).augment_quadratic(2.0, vec({1, 0}));
  CHECK(q.eval_component(0, vec({0, 0}), ledger) == 1.0);
}

TEST_CASE("logistic component matches a straight-line scalar implementation") {
  const Dataset data = synth_dataset(30, 5, 11, 2.0);
  const auto p = make_logistic(data, {});
  Rng rng(3);
  QueryLedger ledger;
  for (int trial = 0; trial < 20; ++trial) {
    const Vector w = fixtures::random_vector(5, rng);
    for (std::size_t i = 0; i < data.n(); ++i) {
      double z = 0.0;
      for (const auto& e : data.rows[i]) z += e.value * w[e.index];
      const double expect = std::log(1.0 + std::exp(z)) - data.labels[i] * z;
      CHECK(std::abs(p.eval_component(i, w, ledger) - expect) <= 1e-12);
    }
  }
}

TEST_CASE("eval_component rejects bad input") {
  const auto p = fixtures::half_norm_sq(3, 2);
  QueryLedger ledger;
  CHECK_THROWS_AS(p.eval_component(3, vec({1, 2}), ledger), InvalidArgument);
  CHECK_THROWS_AS(p.eval_component(0, vec({NAN, 2}), ledger), InvalidArgument);
  CHECK_THROWS_AS(p.eval_component(0, vec({INFINITY, 2}), ledger), InvalidArgument);
  CHECK_THROWS_AS(p.eval_component(0, vec({1, 2, 3}), ledger), InvalidArgument);
  CHECK(ledger.total() == 0);
}

TEST_CASE("eval_smooth_avg") {
  QueryLedger ledger;
  SUBCASE("arithmetic mean of two linear components") {
    const auto p = fixtures::linear({vec({1}), vec({3})});
    CHECK(p.eval_smooth_avg(vec({1}), ledger) == 2.0);
    CHECK(ledger.total() == 2);
  }
  SUBCASE("n = 1 equals the single component") {
    const auto q = fixtures::random_quadratic(1, 4, 5);
    const auto p = fixtures::make_quadratic_problem(q);
    const Vector x = vec({0.3, -1, 2, 0.5});
    CHECK(p.eval_smooth_avg(x, ledger) == p.eval_component(0, x, ledger));
  }
  SUBCASE("n = 10 random quadratics against a reversed summation") {
    const auto q = fixtures::random_quadratic(10, 6, 9);
    const auto p = fixtures::make_quadratic_problem(q);
    Rng rng(1);
    const Vector x = fixtures::random_vector(6, rng);
    double sum = 0.0;
    for (std::size_t i = 10; i-- > 0;) sum += q.value(i, x);
    CHECK(std::abs(p.eval_smooth_avg(x, ledger) - sum / 10.0) <= 1e-12);
    CHECK(ledger.total() == 10);
  }
}

TEST_CASE("objective adds the unmetered regularizer") {
  QueryLedger ledger;
  const auto l1 = fixtures::zero_problem(2, 2);
  const BlackBoxProblem p(2, 2, [](std::size_t, const Vector&) { return 0.0; }, Regularizer::lasso(1.0),
                          l1.meta());
  CHECK(p.objective(vec({1, -2}), ledger) == 3.0);
  CHECK(ledger.total() == 2);

  const auto q = fixtures::make_quadratic_problem(fixtures::random_quadratic(4, 3, 2));
  const Vector x = vec({1, -1, 0.5});
  CHECK(q.objective(x, ledger) == q.eval_smooth_avg(x, ledger));

  const auto qe = fixtures::make_quadratic_problem(fixtures::random_quadratic(4, 4, 2), Regularizer::elastic_net(1e-3, 1e-5));
  const Vector ones = Vector::Ones(4);
  CHECK(qe.objective(ones, ledger) == doctest::Approx(qe.eval_smooth_avg(ones, ledger) + 4e-3 + 4e-5).epsilon(1e-14));
}

TEST_CASE("augment_quadratic") {
  const auto q = fixtures::random_quadratic(5, 3, 4);
  const auto base = fixtures::make_quadratic_problem(q);
  QueryLedger ledger;
  Rng rng(8);

  SUBCASE("c = 0 leaves evaluations unchanged") {
    const auto same = base.augment_quadratic(0.0, fixtures::random_vector(3, rng));
    const Vector x = fixtures::random_vector(3, rng);
    for (std::size_t i = 0; i < 5; ++i) CHECK(same.eval_component(i, x, ledger) == base.eval_component(i, x, ledger));
  }
  SUBCASE("linearity over 100 random triples") {
    std::uniform_real_distribution<double> uc(0.0, 5.0);
    for (int t = 0; t < 100; ++t) {
      const double c = uc(rng);
      const Vector a = fixtures::random_vector(3, rng);
      const Vector x = fixtures::random_vector(3, rng);
      const auto aug = base.augment_quadratic(c, a);
      const double want = base.eval_component(t % 5, x, ledger) + 0.5 * c * (x - a).squaredNorm();
      CHECK(std::abs(aug.eval_component(t % 5, x, ledger) - want) <= 1e-12 * std::max(1.0, std::abs(want)));
    }
  }
  SUBCASE("a stage coefficient of 2 sigma adds sigma ||x - a||^2") {
    const double sigma = 0.3;
    const Vector a = vec({1, 2, 3});
    const Vector x = vec({0, 0, 1});
    const auto zero = fixtures::zero_problem(1, 3).augment_quadratic(2 * sigma, a);
    CHECK(zero.eval_component(0, x, ledger) == doctest::Approx(sigma * (x - a).squaredNorm()).epsilon(1e-15));
  }
  SUBCASE("meta bookkeeping") {
    const auto convex = fixtures::linear({vec({1, 1})});
    const auto aug = convex.augment_quadratic(0.7, vec({0, 0}));
    CHECK(aug.meta().gamma == 0.7);
    CHECK(aug.meta().L == doctest::Approx(1.7));
    CHECK(aug.meta().convexity == ConvexityTag::StronglyConvex);

    ProblemMeta wc;
    wc.L = 3.0;
    wc.sigma = 0.5;
    wc.convexity = ConvexityTag::WeaklyConvex;
    const auto weak = convex.with_meta(wc).augment_quadratic(1.0, vec({0, 0}));
    CHECK(weak.meta().gamma == 0.5);
    CHECK(weak.meta().sigma == 0.0);
    CHECK(weak.meta().convexity == ConvexityTag::StronglyConvex);
  }
  SUBCASE("ledger is shared with the base problem") {
    const auto aug = base.augment_quadratic(1.0, vec({0, 0, 0}));
    aug.eval_component(0, vec({1, 1, 1}), ledger);
    base.eval_component(0, vec({1, 1, 1}), ledger);
    CHECK(ledger.total() == 2);
  }
  SUBCASE("gradient channel includes the augmentation") {
    const Vector a = vec({1, -1, 0});
    const auto aug = base.augment_quadratic(2.0, a);
    const Vector x = vec({0.2, 0.4, -0.3});
    const Vector g = aug.component_gradient(2, x);
    const Vector fd = fixtures::fd_gradient([&](const Vector& z) { return q.value(2, z) + (z - a).squaredNorm(); }, x);
    CHECK((g - fd).norm() <= 1e-6);
  }
  SUBCASE("negative coefficient is rejected") {
    CHECK_THROWS_AS(base.augment_quadratic(-1.0, vec({0, 0, 0})), InvalidArgument);
  }
}

TEST_CASE("white-box gradients agree with central differences") {
  const Dataset data = synth_dataset(20, 6, 4, 1.0);
  const auto p = make_logistic(data, {});
  Rng rng(12);
  for (int t = 0; t < 10; ++t) {
    const Vector x = fixtures::random_vector(6, rng);
    for (std::size_t i = 0; i < 20; i += 7) {
      const Vector fd = fixtures::fd_gradient([&](const Vector& z) {
        QueryLedger scratch;
        return p.eval_component(i, z, scratch);
      }, x);
      const Vector g = p.component_gradient(i, x);
      CHECK((g - fd).norm() <= 1e-5 * std::max(1.0, g.norm()));
    }
  }
}

TEST_CASE("ledger exactness over a mixed sequence") {
  const auto p = fixtures::half_norm_sq(4, 3);
  QueryLedger ledger;
  const Vector x = vec({1, 2, 3});
  std::uint64_t expect = 0;
  for (int k = 0; k < 17; ++k) {
    p.eval_component(k % 4, x, ledger);
    ++expect;
  }
  p.eval_smooth_avg(x, ledger);
  expect += 4;
  p.objective(x, ledger);
  expect += 4;
  p.diagnostic_objective(x);
  p.smooth_gradient(x);
  CHECK(ledger.total() == expect);
}

TEST_CASE("concurrent evaluations do not lose counts") {
  const auto p = fixtures::half_norm_sq(4, 3);
  QueryLedger ledger;
  std::vector<std::thread> pool;
  for (int t = 0; t < 4; ++t) {
    pool.emplace_back([&] {
      for (int k = 0; k < 5000; ++k) p.eval_component(k % 4, vec({1, 2, 3}), ledger);
    });
  }
  for (auto& th : pool) th.join();
  CHECK(ledger.total() == 20000);
}

TEST_CASE("benchmark view hides gradients but keeps the oracles") {
  const auto p = fixtures::half_norm_sq(2, 2);
  const auto blind = p.benchmark_view();
  CHECK(p.has_whitebox());
  CHECK_FALSE(blind.has_whitebox());
  CHECK_THROWS_AS(blind.smooth_gradient(vec({1, 1})), UnsupportedMode);
  QueryLedger ledger;
  CHECK(blind.eval_component(0, vec({1, 1}), ledger) == 1.0);

  ProblemMeta meta;
  const BlackBoxProblem nograd(1, 1, [](std::size_t, const Vector& x) { return x[0]; }, Regularizer::none(), meta);
  CHECK_FALSE(nograd.has_whitebox());
}

TEST_CASE("meta validation") {
  ProblemMeta m;
  m.L = 0.0;
  CHECK_THROWS_AS(m.validate(), InvalidArgument);
  m.L = 1.0;
  m.gamma = 2.0;
  CHECK_THROWS_AS(m.validate(), InvalidArgument);
  m.gamma = 0.0;
  m.sigma = 1.5;
  CHECK_THROWS_AS(m.validate(), InvalidArgument);
  m.sigma = 0.5;
  m.convexity = ConvexityTag::WeaklyConvex;
  CHECK_NOTHROW(m.validate());

  CHECK_THROWS_AS(BlackBoxProblem(0, 1, [](std::size_t, const Vector&) { return 0.0; }, Regularizer::none(), {}),
                  InvalidArgument);
  CHECK_THROWS_AS(BlackBoxProblem(1, 0, [](std::size_t, const Vector&) { return 0.0; }, Regularizer::none(), {}),
                  InvalidArgument);
}
