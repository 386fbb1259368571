#include "zoprox/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace zoprox {

ParseError::ParseError(std::size_t line, std::string token, const std::string& why)
    : std::runtime_error("line " + std::to_string(line) + ": " + why + " (token \"" + token + "\")"),
      line_(line),
      token_(std::move(token)) {}

void Dataset::validate() const {
  require(rows.size() == labels.size(), "dataset: row and label counts differ");
  for (std::size_t r = 0; r < rows.size(); ++r) {
    require(labels[r] == 0 || labels[r] == 1, "dataset: labels must be 0 or 1");
    for (std::size_t k = 0; k < rows[r].size(); ++k) {
      require(rows[r][k].index < d, "dataset: feature index out of range");
      if (k > 0) require(rows[r][k - 1].index < rows[r][k].index, "dataset: indices must be strictly ascending");
    }
  }
}

namespace {

bool parse_double(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

bool parse_index(std::string_view s, std::uint64_t& out) {
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

}  // namespace

Dataset parse_libsvm(std::istream& in, std::optional<std::size_t> declared_d) {
  Dataset data;
  std::size_t max_index = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view(line);
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    const auto tokens = split_ws(view);
    if (tokens.empty()) continue;

    double label = 0.0;
    if (!parse_double(tokens[0], label)) throw ParseError(lineno, std::string(tokens[0]), "label is not numeric");
    int mapped = 0;
    if (label == 1.0) {
      mapped = 1;
    } else if (label == -1.0 || label == 0.0) {
      mapped = 0;
    } else {
      throw ParseError(lineno, std::string(tokens[0]), "label must be +1, -1, 1 or 0");
    }

    SparseRow row;
    row.reserve(tokens.size() - 1);
    std::uint64_t prev = 0;
    for (std::size_t t = 1; t < tokens.size(); ++t) {
      const std::string_view tok = tokens[t];
      const auto colon = tok.find(':');
      if (colon == std::string_view::npos) throw ParseError(lineno, std::string(tok), "expected idx:value");
      std::uint64_t idx = 0;
      double value = 0.0;
      if (!parse_index(tok.substr(0, colon), idx)) throw ParseError(lineno, std::string(tok), "index is not numeric");
      if (!parse_double(tok.substr(colon + 1), value) || !std::isfinite(value)) {
        throw ParseError(lineno, std::string(tok), "value is not a finite number");
      }
      if (idx < 1) throw ParseError(lineno, std::string(tok), "indices are 1-based");
      if (idx > std::numeric_limits<std::uint32_t>::max()) throw ParseError(lineno, std::string(tok), "index too large");
      if (idx <= prev) throw ParseError(lineno, std::string(tok), "indices must be strictly ascending");
      prev = idx;
      row.push_back({static_cast<std::uint32_t>(idx - 1), value});
      max_index = std::max<std::size_t>(max_index, idx);
    }
    data.rows.push_back(std::move(row));
    data.labels.push_back(mapped);
  }
  if (declared_d) {
    if (*declared_d < max_index) {
      throw ParseError(lineno, std::to_string(max_index), "feature index exceeds declared dimension");
    }
    data.d = *declared_d;
  } else {
    data.d = max_index;
  }
  return data;
}

Dataset read_libsvm_file(const std::string& path, std::optional<std::size_t> declared_d) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open dataset '" + path + "'");
  return parse_libsvm(in, declared_d);
}

std::string format_libsvm_line(const SparseRow& row, int label) {
  std::string out = label == 1 ? "1" : "0";
  char buf[64];
  for (const auto& e : row) {
    out += ' ';
    out += std::to_string(e.index + 1);
    out += ':';
    const auto res = std::to_chars(buf, buf + sizeof(buf), e.value);
    out.append(buf, res.ptr);
  }
  return out;
}

void write_libsvm(std::ostream& out, const Dataset& data) {
  for (std::size_t r = 0; r < data.n(); ++r) out << format_libsvm_line(data.rows[r], data.labels[r]) << '\n';
}

double sparse_dot(const SparseRow& row, const Vector& w) {
  double s = 0.0;
  for (const auto& e : row) s += e.value * w[e.index];
  return s;
}

double sparse_squared_norm(const SparseRow& row) {
  double s = 0.0;
  for (const auto& e : row) s += e.value * e.value;
  return s;
}

namespace {

constexpr double kPlantedScoreScale = 2.0;

}  // namespace

Vector synth_planted_weights(std::size_t d, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector w(static_cast<Eigen::Index>(d));
  for (Eigen::Index j = 0; j < w.size(); ++j) w[j] = normal(rng);
  return w;
}

Dataset synth_dataset(std::size_t n, std::size_t d, std::uint64_t seed, double separability) {
  require(n >= 1 && d >= 1, "synth_dataset: n and d must be at least 1");
  require(separability >= 0.0, "synth_dataset: separability must be nonnegative");
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  Vector w(static_cast<Eigen::Index>(d));
  for (Eigen::Index j = 0; j < w.size(); ++j) w[j] = normal(rng);

  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) = normal(rng);
  const double max_norm = x.rowwise().norm().maxCoeff();
  if (max_norm > 0.0) x /= max_norm;

  const Vector scores = x * w;
  const double mean = scores.mean();
  const double sd = std::sqrt((scores.array() - mean).square().mean());
  const double unit = sd > 0.0 ? kPlantedScoreScale / sd : 1.0;

  Dataset data;
  data.d = d;
  data.rows.resize(n);
  data.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    SparseRow& row = data.rows[i];
    row.reserve(d);
    for (std::size_t j = 0; j < d; ++j) row.push_back({static_cast<std::uint32_t>(j), x(ii, static_cast<Eigen::Index>(j))});
    const double u = unif(rng);
    if (std::isinf(separability)) {
      data.labels[i] = scores[ii] > 0.0 ? 1 : 0;
    } else {
      const double logit = separability * unit * scores[ii];
      data.labels[i] = u < 1.0 / (1.0 + std::exp(-logit)) ? 1 : 0;
    }
  }
  return data;
}

}  // namespace zoprox
