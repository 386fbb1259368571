#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "zoprox/types.hpp"

namespace zoprox {

struct SparseEntry {
  std::uint32_t index = 0;  // 0-based
  double value = 0.0;

  bool operator==(const SparseEntry&) const = default;
};

using SparseRow = std::vector<SparseEntry>;

/// Binary-labelled sparse design matrix. Labels are 0/1; indices are 0-based
/// and strictly ascending within a row.
struct Dataset {
  std::vector<SparseRow> rows;
  std::vector<int> labels;
  std::size_t d = 0;

  std::size_t n() const { return rows.size(); }
  void validate() const;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::string token, const std::string& why);
  std::size_t line() const { return line_; }
  const std::string& token() const { return token_; }

 private:
  std::size_t line_;
  std::string token_;
};

/// LIBSVM text: "label idx:val ..." with 1-based ascending indices. Labels
/// +1/1 map to 1, -1/0 map to 0. Blank lines and '#' comments are skipped.
/// d is the largest index seen, or `declared_d` when given (must cover every
/// index).
Dataset parse_libsvm(std::istream& in, std::optional<std::size_t> declared_d = std::nullopt);
Dataset read_libsvm_file(const std::string& path, std::optional<std::size_t> declared_d = std::nullopt);

/// Canonical line: "1" or "0", then 1-based "idx:val" pairs with shortest
/// round-trip value formatting.
std::string format_libsvm_line(const SparseRow& row, int label);
void write_libsvm(std::ostream& out, const Dataset& data);

/// Gaussian rows rescaled so the largest has unit norm; labels drawn from a
/// planted logistic model whose logit is `separability` times the planted
/// score normalized to standard deviation 2. separability = +inf gives
/// noiseless sign labels. Bit-identical for equal arguments.
Dataset synth_dataset(std::size_t n, std::size_t d, std::uint64_t seed, double separability);

/// Planted weight vector used by synth_dataset for the same (d, seed).
Vector synth_planted_weights(std::size_t d, std::uint64_t seed);

double sparse_dot(const SparseRow& row, const Vector& w);
double sparse_squared_norm(const SparseRow& row);

}  // namespace zoprox
