// AVX2 + FMA variants of the distribution kernels.
//
// Compiled without global -mavx2: each function carries a target attribute, so
// no AVX2 code can leak into inline functions shared with the rest of the
// library. The dispatcher only hands these out after a CPUID check.

#include <cmath>
#include <cstdint>
#include <limits>

#include <immintrin.h>

#include "leafldp/kernels.hpp"

#define LEAFLDP_AVX2 __attribute__((target("avx2,fma")))

namespace leafldp::kernels {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Vector elementary functions, 4 doubles per register.

/// log(x) for finite x > 0 with normal exponent. Relative error a few ulps.
LEAFLDP_AVX2 inline __m256d vlog(__m256d x) {
  const __m256i bits = _mm256_castpd_si256(x);
  const __m256i mant_mask = _mm256_set1_epi64x(0x000fffffffffffffLL);
  const __m256i one_bits = _mm256_set1_epi64x(0x3ff0000000000000LL);
  __m256d m = _mm256_castsi256_pd(_mm256_or_si256(_mm256_and_si256(bits, mant_mask), one_bits));

  // Biased exponent to double through the 2^52 magic constant.
  const __m256i ebits = _mm256_srli_epi64(bits, 52);
  const __m256d magic = _mm256_set1_pd(0x1.0p52);
  __m256d e = _mm256_sub_pd(
      _mm256_castsi256_pd(_mm256_or_si256(ebits, _mm256_castpd_si256(magic))), magic);
  e = _mm256_sub_pd(e, _mm256_set1_pd(1023.0));

  // m in [sqrt(1/2), sqrt(2)).
  const __m256d big = _mm256_cmp_pd(m, _mm256_set1_pd(1.4142135623730951), _CMP_GT_OQ);
  m = _mm256_blendv_pd(m, _mm256_mul_pd(m, _mm256_set1_pd(0.5)), big);
  e = _mm256_add_pd(e, _mm256_and_pd(big, _mm256_set1_pd(1.0)));

  // log(m) = 2 atanh(s), s = (m-1)/(m+1), |s| <= 0.1716.
  const __m256d f = _mm256_sub_pd(m, _mm256_set1_pd(1.0));
  const __m256d s = _mm256_div_pd(f, _mm256_add_pd(f, _mm256_set1_pd(2.0)));
  const __m256d z = _mm256_mul_pd(s, s);
  __m256d p = _mm256_set1_pd(1.0 / 25.0);
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(1.0 / 23.0));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(1.0 / 21.0));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(1.0 / 19.0));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(1.0 / 17.0));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(1.0 / 15.0));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(1.0 / 13.0));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(1.0 / 11.0));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(1.0 / 9.0));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(1.0 / 7.0));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(1.0 / 5.0));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(1.0 / 3.0));
  // 2s + 2s*z*p, keeping the leading term exact.
  const __m256d two_s = _mm256_add_pd(s, s);
  const __m256d log_m = _mm256_fmadd_pd(_mm256_mul_pd(two_s, z), p, two_s);

  const __m256d ln2_hi = _mm256_set1_pd(6.93147180369123816490e-01);
  const __m256d ln2_lo = _mm256_set1_pd(1.90821492927058770002e-10);
  return _mm256_fmadd_pd(e, ln2_hi, _mm256_fmadd_pd(e, ln2_lo, log_m));
}

/// exp(x) for x <= 709; results below the normal range are flushed to 0
/// (they only ever enter sums dominated by exp(0) = 1). -inf and NaN give 0.
LEAFLDP_AVX2 inline __m256d vexp(__m256d x) {
  const __m256d lowest = _mm256_set1_pd(-708.0);
  const __m256d underflow = _mm256_cmp_pd(x, lowest, _CMP_LT_OQ);  // false for NaN
  const __m256d nan_mask = _mm256_cmp_pd(x, x, _CMP_UNORD_Q);
  x = _mm256_max_pd(x, lowest);  // NaN -> lowest

  const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(1.4426950408889634)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(n, _mm256_set1_pd(6.93147180369123816490e-01), x);
  r = _mm256_fnmadd_pd(n, _mm256_set1_pd(1.90821492927058770002e-10), r);

  // Taylor series to r^13, |r| <= ln2/2.
  __m256d p = _mm256_set1_pd(1.0 / 6227020800.0);
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 479001600.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 39916800.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 3628800.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 362880.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 40320.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 5040.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 720.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 120.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 24.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 6.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(0.5));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));

  // 2^n via the exponent field; n in [-1021, 1023] here.
  const __m256d shifter = _mm256_set1_pd(0x1.8p52);
  const __m256i ni = _mm256_sub_epi64(_mm256_castpd_si256(_mm256_add_pd(n, shifter)),
                                      _mm256_castpd_si256(shifter));
  const __m256i scale_bits = _mm256_slli_epi64(_mm256_add_epi64(ni, _mm256_set1_epi64x(1023)), 52);
  const __m256d result = _mm256_mul_pd(p, _mm256_castsi256_pd(scale_bits));
  return _mm256_andnot_pd(_mm256_or_pd(underflow, nan_mask), result);
}

LEAFLDP_AVX2 inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d pair = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
}

LEAFLDP_AVX2 inline double hmax(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d pair = _mm_max_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_max_sd(pair, _mm_unpackhi_pd(pair, pair)));
}

// ---------------------------------------------------------------------------
// Scalar edges, identical formulas to the reference kernel.

double log_add_scalar(double a, double b) {
  const double hi = a > b ? a : b;
  if (hi == kNegInf) return kNegInf;
  const double lo = a > b ? b : a;
  return hi + std::log1p(std::exp(lo - hi));
}

double step_entry(std::span<const double> in, std::size_t j, double k0, double s, double log_s) {
  const std::size_t len = in.size();
  const double k = k0 + static_cast<double>(j);
  double stay = kNegInf;
  if (j < len) stay = in[j] + (k >= s ? 0.0 : std::log(k) - log_s);
  double up = kNegInf;
  if (j > 0) {
    const double room = s - (k - 1.0);
    up = in[j - 1] + (room > 0.0 ? std::log(room) - log_s : kNegInf);
  }
  return log_add_scalar(stay, up);
}

// ---------------------------------------------------------------------------

LEAFLDP_AVX2 void log_step(std::span<const double> in, std::span<double> out, double k0, double s) {
  const std::size_t len = in.size();
  const double log_s = std::log(s);
  out[0] = step_entry(in, 0, k0, s, log_s);
  if (len == 0) return;

  const __m256d vs = _mm256_set1_pd(s);
  const __m256d vlog_s = _mm256_set1_pd(log_s);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d zero = _mm256_setzero_pd();
  const __m256d neg_inf = _mm256_set1_pd(kNegInf);
  const __m256d lane = _mm256_setr_pd(0.0, 1.0, 2.0, 3.0);

  // Interior entries 1 <= j < len read both in[j] and in[j-1].
  std::size_t j = 1;
  for (; j + 4 <= len; j += 4) {
    const __m256d k = _mm256_add_pd(_mm256_set1_pd(k0 + static_cast<double>(j)), lane);
    const __m256d cur = _mm256_loadu_pd(in.data() + j);
    const __m256d prev = _mm256_loadu_pd(in.data() + j - 1);

    // stay: log(min(k/s, 1)); k >= 1 here because j >= 1.
    const __m256d full = _mm256_cmp_pd(k, vs, _CMP_GE_OQ);
    const __m256d stay_coef = _mm256_andnot_pd(full, _mm256_sub_pd(vlog(k), vlog_s));
    const __m256d stay = _mm256_add_pd(cur, stay_coef);

    // up: log(max(1 - (k-1)/s, 0)) = log(s - k + 1) - log(s).
    const __m256d room = _mm256_sub_pd(vs, _mm256_sub_pd(k, one));
    const __m256d open = _mm256_cmp_pd(room, zero, _CMP_GT_OQ);
    const __m256d safe_room = _mm256_blendv_pd(one, room, open);
    const __m256d up_coef = _mm256_blendv_pd(neg_inf, _mm256_sub_pd(vlog(safe_room), vlog_s), open);
    const __m256d up = _mm256_add_pd(prev, up_coef);

    const __m256d hi = _mm256_max_pd(stay, up);
    const __m256d lo = _mm256_min_pd(stay, up);
    const __m256d dead = _mm256_cmp_pd(hi, neg_inf, _CMP_EQ_OQ);
    const __m256d tail = vlog(_mm256_add_pd(one, vexp(_mm256_sub_pd(lo, hi))));
    const __m256d res = _mm256_blendv_pd(_mm256_add_pd(hi, tail), neg_inf, dead);
    _mm256_storeu_pd(out.data() + j, res);
  }
  for (; j <= len; ++j) out[j] = step_entry(in, j, k0, s, log_s);
}

LEAFLDP_AVX2 double log_sum_exp(std::span<const double> x) {
  const std::size_t len = x.size();
  __m256d vmax = _mm256_set1_pd(kNegInf);
  std::size_t j = 0;
  for (; j + 4 <= len; j += 4) vmax = _mm256_max_pd(vmax, _mm256_loadu_pd(x.data() + j));
  double hi = hmax(vmax);
  for (; j < len; ++j) hi = x[j] > hi ? x[j] : hi;
  if (hi == kNegInf) return kNegInf;

  const __m256d vhi = _mm256_set1_pd(hi);
  __m256d acc = _mm256_setzero_pd();
  j = 0;
  for (; j + 4 <= len; j += 4)
    acc = _mm256_add_pd(acc, vexp(_mm256_sub_pd(_mm256_loadu_pd(x.data() + j), vhi)));
  double sum = hsum(acc);
  for (; j < len; ++j) sum += std::exp(x[j] - hi);
  return hi + std::log(sum);
}

LEAFLDP_AVX2 TiltedSums tilted(std::span<const double> logp, double k0, double lambda) {
  const std::size_t len = logp.size();
  const __m256d vlambda = _mm256_set1_pd(lambda);
  const __m256d lane = _mm256_setr_pd(0.0, 1.0, 2.0, 3.0);

  __m256d vmax = _mm256_set1_pd(kNegInf);
  std::size_t j = 0;
  for (; j + 4 <= len; j += 4) {
    const __m256d k = _mm256_add_pd(_mm256_set1_pd(k0 + static_cast<double>(j)), lane);
    vmax = _mm256_max_pd(vmax, _mm256_add_pd(_mm256_loadu_pd(logp.data() + j),
                                             _mm256_mul_pd(k, vlambda)));
  }
  double hi = hmax(vmax);
  for (; j < len; ++j) {
    const double v = logp[j] + (k0 + static_cast<double>(j)) * lambda;
    hi = v > hi ? v : hi;
  }
  if (hi == kNegInf) return {kNegInf, std::numeric_limits<double>::quiet_NaN()};

  const __m256d vhi = _mm256_set1_pd(hi);
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  j = 0;
  for (; j + 4 <= len; j += 4) {
    const __m256d jj = _mm256_add_pd(_mm256_set1_pd(static_cast<double>(j)), lane);
    const __m256d k = _mm256_add_pd(_mm256_set1_pd(k0 + static_cast<double>(j)), lane);
    const __m256d v = _mm256_add_pd(_mm256_loadu_pd(logp.data() + j), _mm256_mul_pd(k, vlambda));
    const __m256d w = vexp(_mm256_sub_pd(v, vhi));
    acc0 = _mm256_add_pd(acc0, w);
    acc1 = _mm256_fmadd_pd(jj, w, acc1);
  }
  double s0 = hsum(acc0);
  double s1 = hsum(acc1);
  for (; j < len; ++j) {
    const double w = std::exp(logp[j] + (k0 + static_cast<double>(j)) * lambda - hi);
    s0 += w;
    s1 += static_cast<double>(j) * w;
  }
  return {hi + std::log(s0), k0 + s1 / s0};
}

}  // namespace

const KernelTable* avx2_table() {
  static const KernelTable table{Isa::avx2, &log_step, &log_sum_exp, &tilted};
  return &table;
}

}  // namespace leafldp::kernels
