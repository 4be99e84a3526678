#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "leafldp/model.hpp"
#include "leafldp/rng.hpp"

namespace leafldp {

/// Raised when a state leaves the chain's admissible range (Z_n > s_n).
class ChainStateError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct Trajectory {
  ModelSpec model;
  std::vector<std::int64_t> values;  // Z_1 .. Z_n
  std::uint64_t seed = 0;
  std::uint64_t replicate = 0;

  std::int64_t length() const { return static_cast<std::int64_t>(values.size()); }
  std::int64_t at(std::int64_t j) const { return values[static_cast<std::size_t>(j - 1)]; }
};

/// 1 - z / s_n, with the 0/0 = 0 convention (z = 0 always increments).
double increment_probability(const ModelSpec& model, std::int64_t n, std::int64_t z);

/// Z_{n+1} given Z_n = z.
std::int64_t step(const ModelSpec& model, std::int64_t n, std::int64_t z, CounterRng& rng);

/// Z_1 .. Z_n; replicate r uses stream r of the seed.
Trajectory simulate(const ModelSpec& model, std::int64_t n, std::uint64_t seed,
                    std::uint64_t replicate = 0);

/// Z_n only, without storing the path.
std::int64_t simulate_final(const ModelSpec& model, std::int64_t n, std::uint64_t seed,
                            std::uint64_t replicate = 0);

/// Linear interpolation X_N(t) of the path, with X_N(t) = t on [0, k0/N].
/// The default scale is N = length + k0 - 1, the largest N for which the
/// trajectory covers [0, 1] (then X_N(1) = Z_length / N).
double interpolate(const Trajectory& traj, double t, std::optional<std::int64_t> scale = {});

}  // namespace leafldp
