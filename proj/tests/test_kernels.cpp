#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "leafldp/kernels.hpp"

using namespace leafldp;

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

bool close(double a, double b, double tol = 1e-13) {
  if (a == b) return true;  // includes matching infinities
  if (!std::isfinite(a) || !std::isfinite(b)) return false;
  return std::abs(a - b) <= tol * std::max(1.0, std::abs(a));
}

// Log-probability-like vector with some -inf holes at the edges and inside.
std::vector<double> sample_logp(std::mt19937_64& gen, std::size_t size) {
  std::normal_distribution<double> normal(-3.0, 4.0);
  std::vector<double> v(size);
  for (auto& x : v) x = normal(gen);
  if (size > 2) v.front() = kNegInf;
  if (size > 5) v[size / 2] = kNegInf;
  if (size > 7) v.back() = kNegInf;
  return v;
}

std::vector<const kernels::KernelTable*> vector_tables() {
  std::vector<const kernels::KernelTable*> out;
  if (kernels::supported(kernels::Isa::avx2)) out.push_back(kernels::avx2_table());
  return out;
}

}  // namespace

TEST_CASE("scalar reference: hand values") {
  const auto& k = kernels::scalar_table();
  const std::vector<double> empty;
  CHECK(k.log_sum_exp(empty) == kNegInf);
  const std::vector<double> two{std::log(0.25), std::log(0.75)};
  CHECK(k.log_sum_exp(two) == doctest::Approx(0.0).epsilon(1e-15));

  // Uniform chain, n = 2: Z_2 = 1 with prob 1, s_2 = 2 -> {1: 1/2, 2: 1/2}.
  const std::vector<double> in{0.0};
  std::vector<double> out(2);
  k.log_step(in, out, 1.0, 2.0);
  CHECK(std::exp(out[0]) == doctest::Approx(0.5));
  CHECK(std::exp(out[1]) == doctest::Approx(0.5));

  const auto t = k.tilted(two, 1.0, 0.0);
  CHECK(t.log_sum == doctest::Approx(0.0));
  CHECK(t.mean == doctest::Approx(1.75));
}

TEST_CASE("vector kernels match the scalar reference") {
  const auto tables = vector_tables();
  if (tables.empty()) {
    MESSAGE("no vector kernel supported on this CPU; nothing to compare");
    return;
  }
  const auto& ref = kernels::scalar_table();
  std::mt19937_64 gen(2024);
  for (const auto* vec : tables) {
    CAPTURE(kernels::to_string(vec->isa));
    for (std::size_t size = 0; size <= 67; ++size) {
      CAPTURE(size);
      for (int trial = 0; trial < 8; ++trial) {
        const auto logp = sample_logp(gen, size);
        REQUIRE(close(ref.log_sum_exp(logp), vec->log_sum_exp(logp)));

        for (double lambda : {-3.0, -0.5, 0.0, 0.7, 4.0}) {
          const double k0 = static_cast<double>(trial % 3);
          const auto a = ref.tilted(logp, k0, lambda);
          const auto b = vec->tilted(logp, k0, lambda);
          REQUIRE(close(a.log_sum, b.log_sum));
          if (std::isfinite(a.log_sum)) REQUIRE(close(a.mean, b.mean, 1e-12));
        }

        if (size == 0) continue;
        const double k0 = static_cast<double>(trial % 3);
        // s at least the top state so both transition weights are valid.
        const double s = k0 + static_cast<double>(size) - 1.0 + 0.5 * trial;
        if (s <= 0.0) continue;
        std::vector<double> o1(size + 1), o2(size + 1);
        ref.log_step(logp, o1, k0, s);
        vec->log_step(logp, o2, k0, s);
        for (std::size_t j = 0; j <= size; ++j) REQUIRE(close(o1[j], o2[j]));
      }
    }
  }
}

TEST_CASE("dispatch") {
  CHECK(kernels::supported(kernels::Isa::scalar));
  kernels::select(kernels::Isa::scalar);
  CHECK(kernels::active().isa == kernels::Isa::scalar);
  if (kernels::supported(kernels::Isa::avx2)) {
    kernels::select(kernels::Isa::avx2);
    CHECK(kernels::active().isa == kernels::Isa::avx2);
  } else {
    CHECK_THROWS_AS(kernels::select(kernels::Isa::avx2), std::invalid_argument);
  }
}
