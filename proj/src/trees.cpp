#include "leafldp/trees.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "leafldp/chain.hpp"
#include "leafldp/pmf.hpp"
#include "leafldp/pressure.hpp"
#include "leafldp/stats.hpp"

namespace leafldp {

PaGraph::PaGraph(double beta) : beta_(beta) {
  if (!(beta > -1.0)) throw std::invalid_argument("PaGraph: beta must exceed -1");
  degree_ = {1, 1};
  distinct_ = {1, 1};
  adjacency_ = {{1}, {0}};
  endpoints_ = {0, 1};
  leaves_ = 2;
  buds_ = 2;
}

std::int64_t PaGraph::draw_target(CounterRng& rng) const {
  const auto slots = static_cast<std::uint64_t>(endpoints_.size());
  if (beta_ == 0.0) return endpoints_[rng.below(slots)];
  if (beta_ > 0.0) {
    // Mixture: degree part D, uniform part V beta.
    const double d = static_cast<double>(slots);
    const double w = d + beta_ * static_cast<double>(degree_.size());
    if (rng.uniform() * w < d) return endpoints_[rng.below(slots)];
    return static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(degree_.size())));
  }
  // -1 < beta < 0: propose by degree, accept with (d + beta) / d.
  for (;;) {
    const std::int64_t v = endpoints_[rng.below(slots)];
    const auto d = static_cast<double>(degree_[static_cast<std::size_t>(v)]);
    if (rng.uniform() * d < d + beta_) return v;
  }
}

std::int64_t PaGraph::add_vertex(std::int64_t edges, CounterRng& rng) {
  if (edges < 1) throw std::invalid_argument("PaGraph: a new vertex needs at least one edge");
  const std::int64_t target = draw_target(rng);
  const auto x = static_cast<std::size_t>(target);
  const auto v = static_cast<std::int64_t>(degree_.size());

  if (degree_[x] == 1) --leaves_;
  if (distinct_[x] == 1) --buds_;
  degree_[x] += edges;
  distinct_[x] += 1;

  degree_.push_back(edges);
  distinct_.push_back(1);
  adjacency_.emplace_back(static_cast<std::size_t>(edges), target);
  adjacency_[x].insert(adjacency_[x].end(), static_cast<std::size_t>(edges), v);
  if (edges == 1) ++leaves_;
  ++buds_;
  for (std::int64_t e = 0; e < edges; ++e) {
    endpoints_.push_back(target);
    endpoints_.push_back(v);
  }
  return target;
}

std::int64_t PaGraph::count_leaves() const {
  return std::count_if(adjacency_.begin(), adjacency_.end(),
                       [](const auto& adj) { return adj.size() == 1; });
}

std::int64_t PaGraph::count_buds() const {
  return std::count_if(adjacency_.begin(), adjacency_.end(), [](const auto& adj) {
    return !adj.empty() && std::all_of(adj.begin(), adj.end(), [&](auto u) { return u == adj.front(); });
  });
}

GrowthResult grow_pa_graph(const ModelSpec& model, std::int64_t n, std::uint64_t seed,
                           std::uint64_t replicate) {
  const auto& s = model.slopes;
  if (s.kind() != SlopeKind::pref_attach && s.kind() != SlopeKind::randomized_pa)
    throw std::invalid_argument("grow_pa_graph: model is not preferential attachment");
  if (s.seed_degree() != 2 || s.seed_vertices() != 2)
    throw std::invalid_argument("grow_pa_graph: only the single-edge seed graph is supported");
  if (n < 1) throw std::invalid_argument("grow_pa_graph: n must be >= 1");
  const bool multi = s.kind() == SlopeKind::randomized_pa;
  PaGraph g(s.slope().value);
  CounterRng rng(seed, replicate);
  for (std::int64_t i = 1; i < n; ++i) g.add_vertex(s.gamma(i), rng);
  return {multi ? "pa_graph_buds" : "pa_graph_leaves", n, multi ? g.buds() : g.leaves(), seed,
          replicate};
}

GrowthResult grow_pa_graph(double beta, std::int64_t n, std::uint64_t seed,
                           std::uint64_t replicate,
                           std::optional<std::pair<GammaPmf, std::uint64_t>> multi_edge) {
  if (!(beta > -1.0)) throw std::invalid_argument("grow_pa_graph: beta must exceed -1");
  const SlopeSequence s =
      multi_edge ? SlopeSequence::randomized_pa(beta, multi_edge->first, multi_edge->second)
                 : SlopeSequence::pref_attach(beta);
  return grow_pa_graph(ModelSpec(s, 2, multi_edge ? "rpa" : "pa"), n, seed, replicate);
}

GrowthResult grow_yule(std::int64_t n, std::uint64_t seed, std::uint64_t replicate) {
  if (n < 1) throw std::invalid_argument("grow_yule: n must be >= 1");
  // Only leaf status and sibling links are needed to track cherries.
  std::vector<std::int64_t> leaves{0};
  std::vector<std::int64_t> sibling{-1};
  std::vector<char> is_leaf{1};
  std::int64_t cherries = 0;
  CounterRng rng(seed, replicate);
  for (std::int64_t k = 1; k < n; ++k) {
    const auto pick = rng.below(static_cast<std::uint64_t>(leaves.size()));
    const std::int64_t leaf = leaves[pick];
    const std::int64_t sib = sibling[static_cast<std::size_t>(leaf)];
    if (sib >= 0 && is_leaf[static_cast<std::size_t>(sib)]) --cherries;  // parent stops being a cherry
    ++cherries;                                                         // leaf becomes one
    is_leaf[static_cast<std::size_t>(leaf)] = 0;
    const auto a = static_cast<std::int64_t>(is_leaf.size());
    const std::int64_t b = a + 1;
    is_leaf.push_back(1);
    is_leaf.push_back(1);
    sibling.push_back(b);
    sibling.push_back(a);
    leaves[pick] = a;
    leaves.push_back(b);
  }
  return {"yule_cherries", n, cherries, seed, replicate};
}

GrowthResult grow_recursive(RecursiveKind kind, std::int64_t n, std::uint64_t seed,
                            std::uint64_t replicate) {
  if (n < 1) throw std::invalid_argument("grow_recursive: n must be >= 1");
  std::vector<std::int64_t> children{0};
  std::vector<std::int64_t> slots;  // plane-oriented: children + 1 slots per vertex
  if (kind == RecursiveKind::plane_oriented) slots.push_back(0);
  std::int64_t leaves = 1;
  CounterRng rng(seed, replicate);
  for (std::int64_t v = 1; v < n; ++v) {
    std::int64_t parent;
    if (kind == RecursiveKind::uniform) {
      parent = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(v)));
    } else {
      parent = slots[rng.below(static_cast<std::uint64_t>(slots.size()))];
      slots.push_back(parent);
      slots.push_back(v);
    }
    if (children[static_cast<std::size_t>(parent)]++ != 0) ++leaves;
    children.push_back(0);
  }
  return {kind == RecursiveKind::uniform ? "uniform_leaves" : "plane_oriented_leaves", n, leaves,
          seed, replicate};
}

std::vector<std::int64_t> stirling_permutation(std::int64_t n, std::uint64_t seed,
                                               std::uint64_t replicate) {
  if (n < 1) throw std::invalid_argument("stirling_permutation: n must be >= 1");
  std::vector<std::int64_t> perm{1, 1};
  perm.reserve(static_cast<std::size_t>(2 * n));
  CounterRng rng(seed, replicate);
  for (std::int64_t k = 1; k < n; ++k) {
    const auto gap = static_cast<std::ptrdiff_t>(rng.below(static_cast<std::uint64_t>(2 * k + 1)));
    perm.insert(perm.begin() + gap, 2, k + 1);
  }
  return perm;
}

std::int64_t count_plateaux(const std::vector<std::int64_t>& perm) {
  std::int64_t p = 0;
  for (std::size_t i = 0; i + 1 < perm.size(); ++i) p += perm[i] == perm[i + 1];
  return p;
}

GrowthResult grow_stirling(std::int64_t n, std::uint64_t seed, std::uint64_t replicate) {
  return {"stirling_plateaux", n + 1, count_plateaux(stirling_permutation(n, seed, replicate)),
          seed, replicate};
}

StatReport verify_clt(const ModelSpec& model, std::int64_t n, std::int64_t reps,
                      std::uint64_t seed, double budget) {
  if (n < 1 || reps < 2) throw std::invalid_argument("verify_clt: need n >= 1 and reps >= 2");
  if (static_cast<double>(n) * static_cast<double>(reps) > budget)
    throw std::invalid_argument(
        fmt::format("verify_clt: n * reps = {} exceeds the budget {}",
                    static_cast<double>(n) * static_cast<double>(reps), budget));
  std::vector<std::int64_t> finals(static_cast<std::size_t>(reps));
  parallel_for(finals.size(), [&](std::size_t r) {
    finals[r] = simulate_final(model, n, seed, static_cast<std::uint64_t>(r));
  });

  const double exact_mean = mean_sequence(model, n).back();
  const double nd = static_cast<double>(n);
  const double root = std::sqrt(nd);
  std::vector<double> scaled(finals.size());
  StatReport rep;
  rep.model = model.name;
  rep.n = n;
  rep.replicates = reps;
  rep.clt_stat_sample.resize(finals.size());
  for (std::size_t r = 0; r < finals.size(); ++r) {
    scaled[r] = static_cast<double>(finals[r]) / nd;
    rep.clt_stat_sample[r] = (static_cast<double>(finals[r]) - exact_mean) / root;
  }
  const Summary m = summarize(scaled);
  const Summary c = summarize(rep.clt_stat_sample);
  rep.empirical_mean = m.mean;
  rep.mean_std_error = m.std_error();
  rep.empirical_var = c.variance;
  rep.target_mean = lln_mean(model.alpha());
  rep.target_var = clt_variance(model.alpha());
  rep.ks_distance = ks_distance_normal(rep.clt_stat_sample, std::sqrt(rep.target_var));
  return rep;
}

StatReport summarize_growth(const std::vector<GrowthResult>& results, double alpha) {
  StatReport rep;
  if (results.empty()) return rep;
  rep.model = results.front().model;
  rep.n = results.front().n;
  rep.replicates = static_cast<std::int64_t>(results.size());
  const double nd = static_cast<double>(rep.n);
  std::vector<double> scaled;
  scaled.reserve(results.size());
  for (const auto& r : results) scaled.push_back(static_cast<double>(r.statistic) / nd);
  const Summary m = summarize(scaled);
  rep.empirical_mean = m.mean;
  rep.mean_std_error = m.std_error();
  rep.clt_stat_sample.reserve(results.size());
  for (double s : scaled) rep.clt_stat_sample.push_back((s - m.mean) * std::sqrt(nd));
  rep.empirical_var = summarize(rep.clt_stat_sample).variance;
  rep.target_mean = lln_mean(alpha);
  rep.target_var = clt_variance(alpha);
  rep.ks_distance = ks_distance_normal(rep.clt_stat_sample, std::sqrt(rep.target_var));
  return rep;
}

}  // namespace leafldp
