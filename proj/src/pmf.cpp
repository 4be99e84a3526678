#include "leafldp/pmf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

#include "leafldp/chain.hpp"
#include "leafldp/kernels.hpp"

namespace leafldp {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kInf = std::numeric_limits<double>::infinity();

// Largest k carrying mass must not exceed s_n (else 1 - k/s_n < 0).
void check_support(const Pmf& p, double s) {
  for (std::size_t j = p.logp.size(); j-- > 0;) {
    if (p.logp[j] == kNegInf) continue;
    const auto k = static_cast<double>(p.k0) + static_cast<double>(j);
    if (k > s * (1.0 + 1e-12))
      throw ChainStateError(
          fmt::format("P(Z_{} = {}) > 0 but s_{} = {} is smaller", p.n, p.k0 + j, p.n, s));
    return;
  }
}

}  // namespace

Pmf Pmf::initial(const ModelSpec& model) { return Pmf{1, model.k0, {0.0}}; }

double Pmf::log_prob(std::int64_t k) const {
  if (k < k_min() || k > k_max()) return kNegInf;
  return logp[static_cast<std::size_t>(k - k0)];
}

double Pmf::log_total() const { return kernels::active().log_sum_exp(logp); }

double Pmf::mean() const { return tilted_mean(*this, 0.0); }

void pmf_advance_inplace(Pmf& p, const ModelSpec& model, std::vector<double>& scratch) {
  const double s = model.slope(p.n);
  check_support(p, s);
  scratch.resize(p.logp.size() + 1);
  kernels::active().log_step(p.logp, scratch, static_cast<double>(p.k0), s);
  std::swap(p.logp, scratch);
  ++p.n;
}

Pmf pmf_advance(const Pmf& p, const ModelSpec& model) {
  Pmf next = p;
  std::vector<double> scratch;
  pmf_advance_inplace(next, model, scratch);
  return next;
}

Pmf pmf_at(const ModelSpec& model, std::int64_t n) {
  if (n < 1) throw std::invalid_argument("pmf_at: n must be >= 1");
  Pmf p = Pmf::initial(model);
  p.logp.reserve(static_cast<std::size_t>(n));
  std::vector<double> scratch;
  scratch.reserve(static_cast<std::size_t>(n));
  while (p.n < n) pmf_advance_inplace(p, model, scratch);
  return p;
}

double log_mgf(const Pmf& p, double lambda) {
  return kernels::active().tilted(p.logp, static_cast<double>(p.k0), lambda).log_sum;
}

double tilted_mean(const Pmf& p, double lambda) {
  return kernels::active().tilted(p.logp, static_cast<double>(p.k0), lambda).mean;
}

PressureEstimates pressure_estimators(const ModelSpec& model, std::int64_t n, double lambda) {
  const std::int64_t ns[] = {n};
  const double lambdas[] = {lambda};
  return estimator_sweep(model, ns, lambdas).front().estimates;
}

std::vector<EstimatorRow> estimator_sweep(const ModelSpec& model, std::span<const std::int64_t> ns,
                                          std::span<const double> lambdas) {
  if (ns.empty() || lambdas.empty()) return {};
  if (!std::is_sorted(ns.begin(), ns.end()) ||
      std::adjacent_find(ns.begin(), ns.end()) != ns.end())
    throw std::invalid_argument("estimator_sweep: n values must be strictly increasing");
  if (ns.front() < 1) throw std::invalid_argument("estimator_sweep: n must be >= 1");

  const auto& k = kernels::active();
  std::vector<EstimatorRow> rows;
  rows.reserve(ns.size() * lambdas.size());
  Pmf p = Pmf::initial(model);
  std::vector<double> scratch;
  for (const std::int64_t n : ns) {
    while (p.n < n) pmf_advance_inplace(p, model, scratch);
    const auto first = rows.size();
    for (const double lambda : lambdas) {
      const auto t = k.tilted(p.logp, static_cast<double>(p.k0), lambda);
      const auto nd = static_cast<double>(n);
      rows.push_back({lambda, n, {t.log_sum / nd, t.log_sum, t.mean / nd}});
    }
    Pmf next = p;
    pmf_advance_inplace(next, model, scratch);
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
      auto& row = rows[first + i];
      const double log_next = k.tilted(next.logp, static_cast<double>(next.k0), row.lambda).log_sum;
      row.estimates.ratio = log_next - row.estimates.ratio;
    }
  }
  return rows;
}

double tail_log_prob(const Pmf& p, double x) {
  if (!(x > 0.0) || !std::isfinite(x)) throw std::invalid_argument("tail_log_prob: x must be > 0");
  const auto nd = static_cast<double>(p.n);
  const double xn = x * nd;
  const auto& k = kernels::active();
  std::span<const double> slice;
  if (x > p.mean() / nd) {
    auto threshold = static_cast<std::int64_t>(std::ceil(xn - 1e-9));
    if (x <= 1.0) {
      // Z_n never reaches n (e.g. at most n - 1 leaves), so for x near 1 the
      // event is read as "at the top of the support".
      std::int64_t top = p.k_max();
      while (top > p.k_min() && p.log_prob(top) == kNegInf) --top;
      threshold = std::min(threshold, top);
    }
    const std::int64_t from = std::max(threshold, p.k_min());
    if (from > p.k_max()) return kInf;
    slice = std::span<const double>(p.logp).subspan(static_cast<std::size_t>(from - p.k0));
  } else {
    const auto threshold = static_cast<std::int64_t>(std::floor(xn + 1e-9));
    const std::int64_t to = std::min(threshold, p.k_max());
    if (to < p.k_min()) return kInf;
    slice = std::span<const double>(p.logp).first(static_cast<std::size_t>(to - p.k0 + 1));
  }
  const double log_p = k.log_sum_exp(slice);
  return log_p == kNegInf ? kInf : -log_p / nd;
}

std::vector<double> mean_sequence(const ModelSpec& model, std::int64_t n) {
  std::vector<double> means;
  means.reserve(static_cast<std::size_t>(std::max<std::int64_t>(n, 0)));
  double m = static_cast<double>(model.k0);
  for (std::int64_t j = 1; j <= n; ++j) {
    means.push_back(m);
    m = 1.0 + m * (1.0 - 1.0 / model.slope(j));
  }
  return means;
}

}  // namespace leafldp
