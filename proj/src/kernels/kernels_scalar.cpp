#include <algorithm>
#include <cmath>
#include <limits>

#include "leafldp/kernels.hpp"

namespace leafldp::kernels {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_add(double a, double b) {
  const double hi = std::max(a, b);
  if (hi == kNegInf) return kNegInf;
  const double lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

void log_step(std::span<const double> in, std::span<double> out, double k0, double s) {
  const std::size_t len = in.size();
  const double log_s = std::log(s);
  for (std::size_t j = 0; j <= len; ++j) {
    const double k = k0 + static_cast<double>(j);
    double stay = kNegInf;
    if (j < len) {
      const double ratio = k >= s ? 0.0 : std::log(k) - log_s;  // log(min(k/s, 1))
      stay = in[j] + ratio;
    }
    double up = kNegInf;
    if (j > 0) {
      const double room = s - (k - 1.0);  // s * (1 - (k-1)/s)
      up = in[j - 1] + (room > 0.0 ? std::log(room) - log_s : kNegInf);
    }
    out[j] = log_add(stay, up);
  }
}

double log_sum_exp(std::span<const double> x) {
  double hi = kNegInf;
  for (double v : x) hi = std::max(hi, v);
  if (hi == kNegInf) return kNegInf;
  double sum = 0.0;
  for (double v : x) sum += std::exp(v - hi);
  return hi + std::log(sum);
}

TiltedSums tilted(std::span<const double> logp, double k0, double lambda) {
  double hi = kNegInf;
  for (std::size_t j = 0; j < logp.size(); ++j)
    hi = std::max(hi, logp[j] + (k0 + static_cast<double>(j)) * lambda);
  if (hi == kNegInf) return {kNegInf, std::numeric_limits<double>::quiet_NaN()};
  double s0 = 0.0;
  double s1 = 0.0;
  for (std::size_t j = 0; j < logp.size(); ++j) {
    const double w = std::exp(logp[j] + (k0 + static_cast<double>(j)) * lambda - hi);
    s0 += w;
    s1 += static_cast<double>(j) * w;
  }
  return {hi + std::log(s0), k0 + s1 / s0};
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{Isa::scalar, &log_step, &log_sum_exp, &tilted};
  return table;
}

}  // namespace leafldp::kernels
