#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "zoprox/dataset.hpp"
#include "zoprox/logistic.hpp"
#include "zoprox/reference.hpp"

using namespace zoprox;
using fixtures::vec;

namespace {

Dataset parse(const std::string& text, std::optional<std::size_t> d = std::nullopt) {
  std::istringstream in(text);
  return parse_libsvm(in, d);
}

std::size_t error_line(const std::string& text) {
  try {
    parse(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

Dataset one_row(SparseRow row, int label, std::size_t d) {
  Dataset ds;
  ds.rows = {std::move(row)};
  ds.labels = {label};
  ds.d = d;
  return ds;
}

}  // namespace

TEST_CASE("parse_libsvm examples") {
  const Dataset a = parse("+1 3:0.5 7:1");
  CHECK(a.labels == std::vector<int>{1});
  CHECK(a.rows[0] == SparseRow{{2, 0.5}, {6, 1.0}});
  CHECK(a.d == 7);

  const Dataset b = parse("-1");
  CHECK(b.labels == std::vector<int>{0});
  CHECK(b.rows[0].empty());

  try {
    parse("1 2:a");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 1);
    CHECK(e.token() == "2:a");
  }
}

TEST_CASE("label mapping, comments and blank lines") {
  const Dataset ds = parse("1 1:1\n\n# header comment\n0 2:2 # trailing\n-1 1:3\n+1\n   \n");
  CHECK(ds.labels == std::vector<int>{1, 0, 0, 1});
  CHECK(ds.rows[1] == SparseRow{{1, 2.0}});
  CHECK(ds.n() == 4);
  CHECK_NOTHROW(ds.validate());
}

TEST_CASE("malformed input reports the offending line") {
  CHECK(error_line("1 1:1\n1 1:1 1:2\n") == 2);
  CHECK(error_line("1 1:1\n\n1 3:1 2:1\n") == 3);
  CHECK(error_line("1 0:1\n") == 1);
  CHECK(error_line("1 1:1\n0 x:1\n") == 2);
  CHECK(error_line("abc 1:1\n") == 1);
  CHECK(error_line("3 1:1\n") == 1);
  CHECK(error_line("1 1:nan\n") == 1);
  CHECK(error_line("1 1:inf\n") == 1);
  CHECK(error_line("1 1\n") == 1);
  CHECK(error_line("1 1:\n") == 1);
}

TEST_CASE("declared dimension") {
  CHECK(parse("1 2:1", 10).d == 10);
  CHECK_THROWS_AS(parse("1 12:1", 10), ParseError);
}

TEST_CASE("round trip reproduces the canonical form") {
  CHECK(format_libsvm_line({{2, 0.5}, {6, 1.0}}, 1) == "1 3:0.5 7:1");
  Rng rng(1);
  std::uniform_int_distribution<int> gap(1, 20), len(0, 15), lab(0, 1);
  std::normal_distribution<double> val(0.0, 100.0);
  for (int t = 0; t < 1000; ++t) {
    SparseRow row;
    std::uint32_t idx = 0;
    for (int k = len(rng); k > 0; --k) {
      idx += static_cast<std::uint32_t>(gap(rng));
      row.push_back({idx - 1, val(rng)});
    }
    const std::string line = format_libsvm_line(row, lab(rng));
    const Dataset ds = parse(line);
    REQUIRE(ds.n() == 1);
    CHECK(ds.rows[0] == row);
    CHECK(format_libsvm_line(ds.rows[0], ds.labels[0]) == line);
  }
  // non-canonical spellings normalize
  std::ostringstream out;
  write_libsvm(out, parse("+1 1:0.50 4:1e0\n-1 2:-3\n"));
  CHECK(out.str() == "1 1:0.5 4:1\n0 2:-3\n");
}

TEST_CASE("a9a header lines") {
  const char* dir = std::getenv("ZOPROX_DATA_DIR");
  const std::filesystem::path path = std::filesystem::path(dir ? dir : "data") / "a9a";
  if (!std::filesystem::exists(path)) {
    MESSAGE("a9a not found, skipping");
    return;
  }
  std::ifstream in(path);
  std::string text, line;
  for (int k = 0; k < 100 && std::getline(in, line); ++k) text += line + "\n";
  const Dataset ds = parse(text);
  CHECK(ds.d <= 123);
  for (int y : ds.labels) CHECK((y == 0 || y == 1));
}

TEST_CASE("make_logistic examples") {
  const Dataset ds = synth_dataset(30, 5, 2, 2.0);
  const BlackBoxProblem p = make_logistic(ds, LogisticSpec{});
  QueryLedger ledger;
  for (std::size_t i = 0; i < ds.n(); ++i) CHECK(p.eval_component(i, Vector::Zero(5), ledger) == doctest::Approx(std::log(2.0)));

  const BlackBoxProblem single = make_logistic(one_row({{0, 1.0}}, 1, 2), LogisticSpec{});
  const double loss = single.eval_component(0, vec({10, 0}), ledger);
  CHECK(std::abs(loss - (std::log1p(std::exp(10.0)) - 10.0)) <= 1e-15);
  CHECK(loss == doctest::Approx(4.54e-5).epsilon(1e-3));

  CHECK(p.regularizer().kind == Regularizer::Kind::ElasticNet);
  CHECK(p.regularizer().l1 == 1e-3);
  CHECK(p.regularizer().l2 == 1e-5);
  CHECK(p.meta().convexity == ConvexityTag::Convex);
  double max_sq = 0.0;
  for (const auto& row : ds.rows) max_sq = std::max(max_sq, sparse_squared_norm(row));
  CHECK(p.meta().L == doctest::Approx(max_sq / 4));
  CHECK_THROWS_AS(make_logistic(ds, LogisticSpec{1e-3, 1e-5, 0.1}), InvalidArgument);
  CHECK_THROWS_AS(make_logistic(Dataset{}, LogisticSpec{}), InvalidArgument);
}

TEST_CASE("logistic white-box gradient matches finite differences") {
  const Dataset ds = synth_dataset(20, 6, 3, 1.0);
  for (double alpha : {0.0, 0.3}) {
    const LogisticSpec spec{1e-3, 1e-5, alpha};
    const BlackBoxProblem p = alpha > 0 ? make_nc_logistic(ds, spec) : make_logistic(ds, spec);
    Rng rng(4);
    for (int t = 0; t < 20; ++t) {
      const Vector w = fixtures::random_vector(6, rng, 2.0);
      const std::size_t i = static_cast<std::size_t>(t) % ds.n();
      const Vector g = p.component_gradient(i, w);
      const Vector fd = fixtures::fd_gradient(
          [&](const Vector& x) {
            QueryLedger l;
            return p.eval_component(i, x, l);
          },
          w);
      CHECK((g - fd).norm() <= 1e-5 * std::max(1.0, g.norm()));
    }
  }
}

TEST_CASE("make_nc_logistic examples") {
  const Dataset empty = one_row({}, 0, 1);
  const BlackBoxProblem nc = make_nc_logistic(empty, LogisticSpec{0, 0, 1.0});
  const BlackBoxProblem base = make_logistic(empty, LogisticSpec{0, 0, 0});
  QueryLedger ledger;
  CHECK(nc.eval_component(0, vec({0}), ledger) == base.eval_component(0, vec({0}), ledger));
  CHECK(nc.component_gradient(0, vec({0})) == base.component_gradient(0, vec({0})));
  CHECK(nc.eval_component(0, vec({1}), ledger) - base.eval_component(0, vec({1}), ledger) == doctest::Approx(0.5));
  CHECK(nc.component_gradient(0, vec({1}))[0] - base.component_gradient(0, vec({1}))[0] == doctest::Approx(0.5));
  CHECK(nc.meta().sigma == 2.0);
  CHECK(nc.meta().convexity == ConvexityTag::WeaklyConvex);
  CHECK_THROWS_AS(make_nc_logistic(empty, LogisticSpec{0, 0, 0}), InvalidArgument);
  CHECK_THROWS_AS(LogisticSpec({-1, 0, 0}).validate(), InvalidArgument);
}

TEST_CASE("nonconvex term curvature stays inside [-sigma, sigma]") {
  const double alpha = 0.7;
  const Dataset empty = one_row({}, 0, 1);
  const BlackBoxProblem nc = make_nc_logistic(empty, LogisticSpec{0, 0, alpha});
  const double h = 1e-4;
  for (double w = -5; w <= 5; w += 0.01) {
    const double g1 = nc.component_gradient(0, vec({w + h}))[0], g0 = nc.component_gradient(0, vec({w - h}))[0];
    const double curv = (g1 - g0) / (2 * h);
    CHECK(std::abs(curv) <= nc.meta().sigma + 1e-6);
  }
}

TEST_CASE("logistic smoothness bound holds") {
  const Dataset ds = synth_dataset(40, 8, 5, 2.0);
  const BlackBoxProblem p = make_logistic(ds, LogisticSpec{});
  Rng rng(6);
  double worst = 0.0;
  for (int t = 0; t < 2000; ++t) {
    const std::size_t i = static_cast<std::size_t>(t) % ds.n();
    const Vector a = fixtures::random_vector(8, rng, 3), b = a + fixtures::random_vector(8, rng, 0.1);
    worst = std::max(worst, (p.component_gradient(i, a) - p.component_gradient(i, b)).norm() / (a - b).norm());
  }
  CHECK(worst <= p.meta().L * 1.01);
}

TEST_CASE("softplus and sigmoid are stable") {
  CHECK(softplus(0) == doctest::Approx(std::log(2.0)));
  CHECK(softplus(800) == 800.0);
  CHECK(softplus(-800) >= 0.0);
  CHECK(std::isfinite(softplus(-800)));
  CHECK(sigmoid(0) == 0.5);
  CHECK(sigmoid(800) == 1.0);
  CHECK(sigmoid(-800) == 0.0);
}

TEST_CASE("synth_dataset") {
  const Dataset a = synth_dataset(50, 7, 9, 2.0), b = synth_dataset(50, 7, 9, 2.0);
  CHECK(a.rows == b.rows);
  CHECK(a.labels == b.labels);
  CHECK(a.d == 7);
  const Dataset c = synth_dataset(50, 7, 10, 2.0);
  CHECK(c.rows != a.rows);
  double max_norm = 0.0;
  for (const auto& row : a.rows) max_norm = std::max(max_norm, std::sqrt(sparse_squared_norm(row)));
  CHECK(max_norm == doctest::Approx(1.0));
  CHECK_NOTHROW(a.validate());
  CHECK_THROWS_AS(synth_dataset(0, 3, 1, 1.0), InvalidArgument);
}

TEST_CASE("infinite separability gives sign labels") {
  const Dataset ds = synth_dataset(300, 6, 11, INFINITY);
  const Vector w = synth_planted_weights(6, 11);
  for (std::size_t i = 0; i < ds.n(); ++i) CHECK(ds.labels[i] == (sparse_dot(ds.rows[i], w) > 0 ? 1 : 0));
}

TEST_CASE("reference fit recovers the planted labels") {
  const Dataset ds = synth_dataset(200, 20, 12, 2.0);
  const BlackBoxProblem p = make_logistic(ds, LogisticSpec{});
  const ReferenceResult fit = reference_solve(p, Vector::Zero(20), 1e-8);
  std::size_t correct = 0, planted_correct = 0;
  const Vector w = synth_planted_weights(20, 12);
  for (std::size_t i = 0; i < ds.n(); ++i) {
    correct += (sparse_dot(ds.rows[i], fit.x) > 0 ? 1 : 0) == ds.labels[i];
    planted_correct += (sparse_dot(ds.rows[i], w) > 0 ? 1 : 0) == ds.labels[i];
  }
  CHECK(static_cast<double>(correct) / ds.n() >= 0.75);
  CHECK(static_cast<double>(planted_correct) / ds.n() >= 0.75);
}

TEST_CASE("reading a missing file fails cleanly") {
  CHECK_THROWS_AS(read_libsvm_file("/nonexistent/zoprox.svm"), InvalidArgument);
}
