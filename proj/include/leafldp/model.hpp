#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace leafldp {

/// Thrown for malformed model strings and invalid model parameters.
class ModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Small exact rational used for user-supplied model parameters.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;  // always > 0, gcd(num, den) == 1

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string str() const;
  friend bool operator==(const Rational&, const Rational&) = default;
};

/// Parses "3", "-0.25", "1.5e-1", "3/2" exactly. Returns nullopt if the text is
/// not a finite decimal or fraction that fits in 64-bit numerator/denominator.
std::optional<Rational> parse_rational(std::string_view text);

/// A real model parameter, carrying its exact rational value when known.
struct Param {
  double value = 0.0;
  std::optional<Rational> exact;

  Param() = default;
  Param(double v) : value(v) {}  // NOLINT: implicit on purpose, floats are inexact
  Param(Rational r) : value(r.value()), exact(r) {}  // NOLINT
  static Param from_string(std::string_view text);
};

/// Finite pmf on positive integers, used for random multi-edge counts.
class GammaPmf {
 public:
  GammaPmf() = default;
  /// Atoms must be positive, distinct; probabilities positive and sum to 1.
  explicit GammaPmf(std::vector<std::pair<std::int64_t, double>> atoms);
  /// "1:0.5+2:0.5"
  static GammaPmf parse(std::string_view text);

  /// Deterministic draw from a uniform variate in [0, 1).
  std::int64_t draw(double u) const;
  double mean() const { return mean_; }
  const std::vector<std::pair<std::int64_t, double>>& atoms() const { return atoms_; }
  std::string str() const;

 private:
  std::vector<std::pair<std::int64_t, double>> atoms_;
  std::vector<double> cumulative_;
  double mean_ = 0.0;
};

enum class SlopeKind {
  linear,
  pref_attach,
  yule,
  uniform_recursive,
  plane_oriented,
  randomized_pa,
};

std::string_view to_string(SlopeKind kind);

/// The normalizing sequence s_n of the leaf chain.
///
/// Immutable after construction; safe to share across threads. For the
/// randomized preferential-attachment kind the multi-edge counts gamma_i are a
/// pure function of (gamma seed, i), fixed once and for all (quenched).
class SlopeSequence {
 public:
  static SlopeSequence linear(Param alpha);
  /// Preferential attachment with weight f(d) = d + beta, seeded by a graph
  /// with total degree `seed_degree` and `seed_vertices` vertices.
  static SlopeSequence pref_attach(Param beta, std::int64_t seed_degree = 2,
                                   std::int64_t seed_vertices = 2);
  static SlopeSequence yule();
  static SlopeSequence uniform_recursive();
  static SlopeSequence plane_oriented();
  static SlopeSequence randomized_pa(Param beta, GammaPmf gamma, std::uint64_t gamma_seed,
                                     std::int64_t seed_degree = 2,
                                     std::int64_t seed_vertices = 2,
                                     std::int64_t horizon = std::int64_t{1} << 17);

  SlopeKind kind() const { return kind_; }
  /// Limit of s_n / n.
  double alpha() const { return alpha_; }
  /// s_n for n >= 1.
  double value(std::int64_t n) const;
  double operator()(std::int64_t n) const { return value(n); }

  /// True when every defining parameter is an exact rational.
  bool is_exact() const;

  const Param& slope() const { return param_; }  // alpha (linear) or beta (PA kinds)
  std::int64_t seed_degree() const { return seed_degree_; }
  std::int64_t seed_vertices() const { return seed_vertices_; }
  const GammaPmf& gamma_pmf() const { return gamma_; }
  std::uint64_t gamma_seed() const { return gamma_seed_; }

  /// gamma_i for i >= 1 (randomized_pa only; 1 for every other kind).
  std::int64_t gamma(std::int64_t i) const;
  /// sum_{i < n} gamma_i.
  std::int64_t gamma_prefix(std::int64_t n) const;

  std::string describe() const;

 private:
  SlopeSequence() = default;

  SlopeKind kind_ = SlopeKind::uniform_recursive;
  Param param_;
  double alpha_ = 1.0;
  std::int64_t seed_degree_ = 0;
  std::int64_t seed_vertices_ = 0;
  GammaPmf gamma_;
  std::uint64_t gamma_seed_ = 0;
  std::shared_ptr<const std::vector<std::int64_t>> gamma_prefix_;
};

/// The chain Z_1 = k0, P(Z_{n+1} - Z_n = 1 | Z_n) = 1 - Z_n / s_n.
struct ModelSpec {
  SlopeSequence slopes;
  std::int64_t k0 = 1;
  std::string name;

  /// Validated construction: k0 <= s_1, s_n >= max(k0, 1) for n >= 2, and
  /// s_n >= k0 + n - 1 for linear slopes with alpha > 1.
  ModelSpec(SlopeSequence s, std::int64_t initial, std::string label);

  double alpha() const { return slopes.alpha(); }
  double slope(std::int64_t n) const { return slopes.value(n); }

  static ModelSpec uniform_recursive();
  static ModelSpec plane_oriented();
  static ModelSpec yule();
  /// Single-edge seed graph: both seed vertices are leaves, so k0 = 2.
  static ModelSpec pref_attach(Param beta);
  static ModelSpec linear(Param alpha, std::int64_t k0);
  static ModelSpec randomized_pa(Param beta, GammaPmf gamma, std::uint64_t gamma_seed);

  /// One line of "key=value" pairs describing the resolved model.
  std::string describe() const;
};

/// Parses a preset string: "plane_oriented", "uniform", "yule",
/// "pa:beta=<r>[,dg=<int>,vg=<int>,k0=<int>]", "linear:alpha=<r>,k0=<int>",
/// "rpa:beta=<r>,gamma=<v:p+v:p...>,seed=<u64>[,dg=..,vg=..,k0=..]".
ModelSpec parse_model(std::string_view text);

}  // namespace leafldp
