#include "leafldp/stats.hpp"

#include <cmath>
#include <map>
#include <numbers>

namespace leafldp {

double Summary::std_error() const {
  return count > 1 ? std::sqrt(variance / static_cast<double>(count)) : 0.0;
}

Summary summarize(std::span<const double> xs) {
  // Welford's update.
  Summary s;
  double m2 = 0.0;
  for (double x : xs) {
    ++s.count;
    const double delta = x - s.mean;
    s.mean += delta / static_cast<double>(s.count);
    m2 += delta * (x - s.mean);
  }
  s.variance = s.count > 1 ? m2 / static_cast<double>(s.count - 1) : 0.0;
  return s;
}

double ks_distance_normal(std::span<const double> xs, double sigma) {
  if (xs.empty()) return 0.0;
  std::vector<double> sorted(xs.begin(), xs.end());
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<double>(sorted.size());
  auto cdf = [&](double x) {
    if (sigma <= 0.0) return x < 0.0 ? 0.0 : 1.0;
    return 0.5 * std::erfc(-x / (sigma * std::numbers::sqrt2));
  };
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    // Evaluate only at the last copy of tied values.
    if (i + 1 < sorted.size() && sorted[i + 1] == sorted[i]) continue;
    const double f = cdf(sorted[i]);
    const double below = [&] {
      std::size_t j = i;
      while (j > 0 && sorted[j - 1] == sorted[i]) --j;
      return static_cast<double>(j) / n;
    }();
    d = std::max({d, std::abs(static_cast<double>(i + 1) / n - f), std::abs(f - below)});
  }
  return std::min(d, 1.0);
}

double total_variation(std::span<const std::int64_t> values, const Pmf& exact) {
  std::map<std::int64_t, std::size_t> counts;
  for (auto v : values) ++counts[v];
  const auto total = static_cast<double>(values.size());
  double tv = 0.0;
  for (std::int64_t k = exact.k_min(); k <= exact.k_max(); ++k) {
    const auto it = counts.find(k);
    const double emp = it == counts.end() ? 0.0 : static_cast<double>(it->second) / total;
    tv += std::abs(emp - std::exp(exact.log_prob(k)));
  }
  for (const auto& [k, c] : counts)
    if (k < exact.k_min() || k > exact.k_max()) tv += static_cast<double>(c) / total;
  return 0.5 * tv;
}

unsigned default_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

}  // namespace leafldp
