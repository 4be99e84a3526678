#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <thread>
#include <vector>

#include "leafldp/pmf.hpp"

namespace leafldp {

/// Mean and unbiased variance of a sample.
struct Summary {
  std::size_t count = 0;
  double mean = 0.0;
  double variance = 0.0;

  /// Standard error of the mean.
  double std_error() const;
};

Summary summarize(std::span<const double> xs);

/// sup_x |F_n(x) - Phi(x / sigma)| for the empirical cdf F_n of `xs`.
double ks_distance_normal(std::span<const double> xs, double sigma);

/// (1/2) sum_k |count_k / total - P(Z = k)| over the union of supports.
/// `values` holds one observed statistic per sample.
double total_variation(std::span<const std::int64_t> values, const Pmf& exact);

/// Worker count used by parallel_for: hardware concurrency, at least 1.
unsigned default_threads();

/// Calls fn(i) for i in [0, count) on up to `threads` workers. Each index is
/// handled exactly once; results must be written to per-index slots so the
/// outcome does not depend on scheduling.
template <class Fn>
void parallel_for(std::size_t count, Fn&& fn, unsigned threads = default_threads()) {
  const std::size_t workers = std::min<std::size_t>(std::max(threads, 1u), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < count; i += workers) fn(i);
    });
  }
}

}  // namespace leafldp
