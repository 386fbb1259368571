#pragma once

#include <atomic>
#include <cstdint>

namespace zoprox {

/// Count of component-function evaluations (the FQC metric). Monotone: the
/// only mutation is `record`, so a count can never be taken back.
class QueryLedger {
 public:
  QueryLedger() = default;
  QueryLedger(const QueryLedger&) = delete;
  QueryLedger& operator=(const QueryLedger&) = delete;

  void record(std::uint64_t count = 1) { total_.fetch_add(count, std::memory_order_relaxed); }
  std::uint64_t total() const { return total_.load(std::memory_order_relaxed); }

 private:
  std::atomic<std::uint64_t> total_{0};
};

}  // namespace zoprox
