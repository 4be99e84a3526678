#include "leafldp/chain.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace leafldp {

namespace {

constexpr double kSlack = 1e-12;

}  // namespace

double increment_probability(const ModelSpec& model, std::int64_t n, std::int64_t z) {
  if (z == 0) return 1.0;
  const double s = model.slope(n);
  const auto zd = static_cast<double>(z);
  if (zd > s * (1.0 + kSlack))
    throw ChainStateError(fmt::format("Z_{} = {} exceeds s_{} = {}", n, z, n, s));
  return zd >= s ? 0.0 : 1.0 - zd / s;
}

std::int64_t step(const ModelSpec& model, std::int64_t n, std::int64_t z, CounterRng& rng) {
  if (n < 1) throw std::invalid_argument("step index must be >= 1");
  if (z < model.k0 || z > model.k0 + n - 1)
    throw ChainStateError(fmt::format("Z_{} = {} outside [{}, {}]", n, z, model.k0, model.k0 + n - 1));
  (void)increment_probability(model, n, z);  // range check
  if (z == 0) return 1;
  const double s = model.slope(n);
  // u < 1 - z/s, written as u*s < s - z so that simulate_final draws identically.
  return z + (rng.uniform() * s < s - static_cast<double>(z) ? 1 : 0);
}

Trajectory simulate(const ModelSpec& model, std::int64_t n, std::uint64_t seed,
                    std::uint64_t replicate) {
  if (n < 1) throw std::invalid_argument("trajectory length must be >= 1");
  Trajectory traj{model, {}, seed, replicate};
  traj.values.reserve(static_cast<std::size_t>(n));
  CounterRng rng(seed, replicate);
  std::int64_t z = model.k0;
  traj.values.push_back(z);
  for (std::int64_t j = 1; j < n; ++j) {
    z = step(model, j, z, rng);
    traj.values.push_back(z);
  }
  return traj;
}

std::int64_t simulate_final(const ModelSpec& model, std::int64_t n, std::uint64_t seed,
                            std::uint64_t replicate) {
  if (n < 1) throw std::invalid_argument("trajectory length must be >= 1");
  CounterRng rng(seed, replicate);
  std::int64_t z = model.k0;
  for (std::int64_t j = 1; j < n; ++j) {
    // Inline of step(): u < 1 - z/s  <=>  u*s < s - z.
    const double s = model.slope(j);
    const auto zd = static_cast<double>(z);
    if (zd > s * (1.0 + kSlack))
      throw ChainStateError(fmt::format("Z_{} = {} exceeds s_{} = {}", j, z, j, s));
    if (z == 0 || rng.uniform() * s < s - zd) ++z;
  }
  return z;
}

double interpolate(const Trajectory& traj, double t, std::optional<std::int64_t> scale) {
  if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("interpolate: t must lie in [0, 1]");
  const std::int64_t k0 = traj.model.k0;
  const std::int64_t big_n = scale.value_or(traj.length() + k0 - 1);
  if (big_n < 1) throw std::invalid_argument("interpolate: scale must be >= 1");
  const auto nd = static_cast<double>(big_n);
  if (t * nd <= static_cast<double>(k0)) return t;

  const double nt = t * nd;
  const auto floor_nt = static_cast<std::int64_t>(std::floor(nt));
  const double frac = nt - static_cast<double>(floor_nt);
  const std::int64_t lo = floor_nt - k0 + 1;
  const std::int64_t hi = lo + 1;
  const std::int64_t needed = frac > 0.0 ? hi : lo;
  if (lo < 1 || needed > traj.length())
    throw std::out_of_range(fmt::format(
        "interpolate: scale {} needs Z_{} but the trajectory has length {}", big_n, needed,
        traj.length()));
  const auto z_lo = static_cast<double>(traj.at(lo));
  const double rise = frac > 0.0 ? static_cast<double>(traj.at(hi)) - z_lo : 0.0;
  return z_lo / nd + frac / nd * rise;
}

}  // namespace leafldp
