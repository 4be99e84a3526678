#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "leafldp/model.hpp"

namespace leafldp {

/// Exact law of Z_n in log space: logp[j] = log P(Z_n = k0 + j), j < n.
/// Entries may be -inf. These are the coefficients of p_n(u) = E[u^{Z_n}].
struct Pmf {
  std::int64_t n = 1;
  std::int64_t k0 = 0;
  std::vector<double> logp;

  /// Point mass at k0, step 1.
  static Pmf initial(const ModelSpec& model);

  std::int64_t k_min() const { return k0; }
  std::int64_t k_max() const { return k0 + static_cast<std::int64_t>(logp.size()) - 1; }
  /// -inf outside the support.
  double log_prob(std::int64_t k) const;
  /// log sum of the probabilities (0 up to rounding).
  double log_total() const;
  double mean() const;
};

/// Step n -> n + 1 of the exact recursion
///   P_{n+1}(k) = P_n(k) k / s_n + P_n(k-1) (1 - (k-1)/s_n).
/// Throws ChainStateError if mass sits above s_n.
Pmf pmf_advance(const Pmf& p, const ModelSpec& model);

/// Same as pmf_advance, reusing `scratch` as the output buffer; `p` is
/// replaced by the new pmf.
void pmf_advance_inplace(Pmf& p, const ModelSpec& model, std::vector<double>& scratch);

/// The pmf at step n, starting from Pmf::initial.
Pmf pmf_at(const ModelSpec& model, std::int64_t n);

/// log m_n(lambda) = log E[exp(lambda Z_n)].
double log_mgf(const Pmf& p, double lambda);

/// E[Z_n] under the tilted law with weights P(Z_n = k) e^{k lambda}.
double tilted_mean(const Pmf& p, double lambda);

/// Finite-n approximations of the pressure and its slope.
struct PressureEstimates {
  double per_n;     // (1/n) log m_n
  double ratio;     // log m_{n+1} - log m_n
  double logderiv;  // m_n' / (n m_n)
};

PressureEstimates pressure_estimators(const ModelSpec& model, std::int64_t n, double lambda);

struct EstimatorRow {
  double lambda;
  std::int64_t n;
  PressureEstimates estimates;
};

/// Estimators for every (n, lambda) pair in one pass of the recursion.
/// Rows are ordered by n, then by lambda in the given order.
std::vector<EstimatorRow> estimator_sweep(const ModelSpec& model, std::span<const std::int64_t> ns,
                                          std::span<const double> lambdas);

/// -(1/n) log P(Z_n >= ceil(x n)) when x exceeds the mean of Z_n / n,
/// otherwise -(1/n) log P(Z_n <= floor(x n)). For x <= 1 an upper threshold
/// above the largest attainable value is lowered to that value, so x = 1
/// measures the top of the support. +inf for an empty event.
double tail_log_prob(const Pmf& p, double x);

/// E[Z_j] for j = 1..n from E[Z_{j+1}] = 1 + E[Z_j] (1 - 1/s_j).
std::vector<double> mean_sequence(const ModelSpec& model, std::int64_t n);

}  // namespace leafldp
