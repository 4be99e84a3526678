#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "leafldp/model.hpp"
#include "leafldp/rng.hpp"

namespace leafldp {

/// One grown object and its counted statistic.
struct GrowthResult {
  std::string model;
  std::int64_t n = 0;          // chain step the object corresponds to
  std::int64_t statistic = 0;  // leaves, buds, cherries or plateaux
  std::uint64_t seed = 0;
  std::uint64_t replicate = 0;
};

/// Multigraph grown by preferential attachment with weights d + beta.
///
/// Starts from a single edge. Each added vertex brings `edges` parallel edges
/// to one existing vertex. Leaf (degree 1) and bud (exactly one distinct
/// neighbour) counts are maintained incrementally; count_leaves and
/// count_buds recompute them from the adjacency lists.
class PaGraph {
 public:
  explicit PaGraph(double beta);

  std::int64_t vertices() const { return static_cast<std::int64_t>(degree_.size()); }
  std::int64_t total_degree() const { return static_cast<std::int64_t>(endpoints_.size()); }
  std::int64_t degree(std::int64_t v) const { return degree_[static_cast<std::size_t>(v)]; }
  const std::vector<std::int64_t>& neighbours(std::int64_t v) const {
    return adjacency_[static_cast<std::size_t>(v)];
  }

  /// Adds a vertex joined by `edges` parallel edges to a target drawn with
  /// probability proportional to degree + beta. Returns the target.
  std::int64_t add_vertex(std::int64_t edges, CounterRng& rng);

  std::int64_t leaves() const { return leaves_; }
  std::int64_t buds() const { return buds_; }
  std::int64_t count_leaves() const;
  std::int64_t count_buds() const;

 private:
  std::int64_t draw_target(CounterRng& rng) const;

  double beta_;
  std::vector<std::int64_t> degree_;
  std::vector<std::int64_t> distinct_;  // number of distinct neighbours
  std::vector<std::vector<std::int64_t>> adjacency_;
  std::vector<std::int64_t> endpoints_;  // one slot per edge end
  std::int64_t leaves_ = 0;
  std::int64_t buds_ = 0;
};

/// Grows a preferential-attachment graph for chain step n (n + 1 vertices).
/// `model` must be a pref_attach or randomized_pa model with the single-edge
/// seed (dG1 = vG1 = 2). For pref_attach the statistic is the leaf count; for
/// randomized_pa the vertex added at step i brings gamma_i edges, taken from
/// the model's quenched environment, and the statistic is the bud count.
GrowthResult grow_pa_graph(const ModelSpec& model, std::int64_t n, std::uint64_t seed,
                           std::uint64_t replicate = 0);

/// Same with a plain beta and an optional multi-edge environment.
GrowthResult grow_pa_graph(double beta, std::int64_t n, std::uint64_t seed,
                           std::uint64_t replicate = 0,
                           std::optional<std::pair<GammaPmf, std::uint64_t>> multi_edge = {});

/// Yule tree with n leaves; statistic = cherries.
GrowthResult grow_yule(std::int64_t n, std::uint64_t seed, std::uint64_t replicate = 0);

enum class RecursiveKind { uniform, plane_oriented };

/// Recursive tree with n vertices; statistic = childless vertices (the lone
/// root counts as one).
GrowthResult grow_recursive(RecursiveKind kind, std::int64_t n, std::uint64_t seed,
                            std::uint64_t replicate = 0);

/// Random Stirling permutation of {1, 1, ..., n, n}, built by inserting the
/// pair (k+1)(k+1) into one of the 2k + 1 gaps uniformly.
std::vector<std::int64_t> stirling_permutation(std::int64_t n, std::uint64_t seed,
                                               std::uint64_t replicate = 0);

/// Adjacent equal pairs a_i = a_{i+1}, i = 1..2n-1.
std::int64_t count_plateaux(const std::vector<std::int64_t>& perm);

/// Plateaux of a random Stirling permutation of order n; reported at chain
/// step n + 1 of the plane-oriented model.
GrowthResult grow_stirling(std::int64_t n, std::uint64_t seed, std::uint64_t replicate = 0);

/// Leaf-count Monte Carlo summary for the chain.
struct StatReport {
  std::string model;
  std::int64_t n = 0;
  std::int64_t replicates = 0;
  double empirical_mean = 0.0;   // mean of Z_n / n
  double mean_std_error = 0.0;
  double empirical_var = 0.0;    // variance of (Z_n - E Z_n) / sqrt(n)
  std::vector<double> clt_stat_sample;
  double ks_distance = 0.0;
  double target_mean = 0.0;      // alpha / (alpha + 1)
  double target_var = 0.0;       // alpha^2 / ((1 + alpha)^2 (2 + alpha))
};

/// Runs `reps` chain replicates (replicate r uses stream r of `seed`) and
/// compares with the limit laws. Rejects n * reps above `budget`.
StatReport verify_clt(const ModelSpec& model, std::int64_t n, std::int64_t reps,
                      std::uint64_t seed, double budget = 2e10);

/// Z_n / n samples from one of the combinatorial simulators.
StatReport summarize_growth(const std::vector<GrowthResult>& results, double alpha);

}  // namespace leafldp
