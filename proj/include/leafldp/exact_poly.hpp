#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "leafldp/model.hpp"

namespace leafldp {

/// Raised when an exact computation is asked of a model with a float slope.
class InexactModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// p_n(u) = E[u^{Z_n}] with exact rational coefficients, coeffs[k] of u^k.
struct ExactPoly {
  std::int64_t n = 0;  // 0 for a polynomial not tied to a chain step
  std::vector<mpq_class> coeffs;

  /// -1 for the zero polynomial.
  std::int64_t degree() const;
  mpq_class sum() const;
  std::string str() const;
};

inline constexpr std::int64_t kDefaultExactMaxN = 40;

/// s_n as an exact rational. Throws InexactModelError for float parameters.
mpq_class exact_slope(const SlopeSequence& slopes, std::int64_t n);

/// Exact p_n from p_1 = u^{k0} and
///   p_{n+1}(u) = u (1 - u) p_n'(u) / s_n + u p_n(u).
/// Throws std::invalid_argument when n > max_n, InexactModelError for float
/// slopes and ChainStateError when mass sits above s_j.
ExactPoly exact_poly(const ModelSpec& model, std::int64_t n,
                     std::int64_t max_n = kDefaultExactMaxN);

/// Root counts from exact Sturm sequences.
struct RootReport {
  bool real_rooted = false;  // every root real and <= 0
  std::int64_t degree = 0;
  std::int64_t zero_multiplicity = 0;
  std::int64_t negative_roots = 0;           // counted with multiplicity
  std::int64_t distinct_negative_roots = 0;
  bool monomial = false;                     // c u^m, all roots at 0

  bool negatives_simple() const { return negative_roots == distinct_negative_roots; }
  std::string str() const;
};

/// True in `real_rooted` iff all roots of the polynomial are real and <= 0.
/// Throws std::invalid_argument for the zero polynomial.
RootReport certify_real_rooted(const ExactPoly& poly);

/// Root layout forced by the recursion: a root of multiplicity m at 0 and
/// simple negative roots, one for each step j < n that raised the degree
/// while the polynomial was no longer a monomial.
struct RootStructure {
  std::int64_t zero_multiplicity = 0;
  std::int64_t negative_roots = 0;
  bool monomial = false;  // no step has left the monomial stage yet
};

RootStructure predicted_root_structure(const ModelSpec& model, std::int64_t n,
                                       std::int64_t max_n = kDefaultExactMaxN);

/// certify_real_rooted(exact_poly(model, n)) checked against the predicted
/// structure.
struct Certification {
  RootReport report;
  RootStructure expected;
  bool passed = false;
};

Certification certify_model(const ModelSpec& model, std::int64_t n,
                            std::int64_t max_n = kDefaultExactMaxN);

}  // namespace leafldp
