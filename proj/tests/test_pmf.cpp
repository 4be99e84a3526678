#include <doctest.h>

#include <cmath>
#include <functional>
#include <map>
#include <numbers>

#include "leafldp/chain.hpp"
#include "leafldp/kernels.hpp"
#include "leafldp/pmf.hpp"

using namespace leafldp;

namespace {

// Exact law of Z_n by walking every up/stay path of the chain.
std::map<std::int64_t, double> enumerate_paths(const ModelSpec& m, std::int64_t n) {
  std::map<std::int64_t, double> law;
  std::function<void(std::int64_t, std::int64_t, double)> walk = [&](std::int64_t j, std::int64_t z,
                                                                      double p) {
    if (p == 0.0) return;
    if (j == n) {
      law[z] += p;
      return;
    }
    const double s = m.slope(j);
    const double up = z == 0 ? 1.0 : 1.0 - static_cast<double>(z) / s;
    walk(j + 1, z + 1, p * up);
    walk(j + 1, z, p * (1.0 - up));
  };
  walk(1, m.k0, 1.0);
  return law;
}

std::vector<ModelSpec> presets() {
  return {ModelSpec::uniform_recursive(),
          ModelSpec::plane_oriented(),
          ModelSpec::yule(),
          ModelSpec::pref_attach(Rational{0, 1}),
          ModelSpec::pref_attach(Rational{-1, 2}),
          ModelSpec::linear(Rational{3, 1}, 1),
          ModelSpec::randomized_pa(Rational{1, 3}, GammaPmf({{1, 0.5}, {2, 0.5}}), 4)};
}

}  // namespace

TEST_CASE("hand examples") {
  const auto u = pmf_at(ModelSpec::uniform_recursive(), 3);
  CHECK(std::exp(u.log_prob(1)) == doctest::Approx(0.5));
  CHECK(std::exp(u.log_prob(2)) == doctest::Approx(0.5));
  const auto p = pmf_at(ModelSpec::plane_oriented(), 3);
  CHECK(std::exp(p.log_prob(1)) == doctest::Approx(1.0 / 3.0));
  CHECK(std::exp(p.log_prob(2)) == doctest::Approx(2.0 / 3.0));
  CHECK(p.log_prob(0) == -std::numeric_limits<double>::infinity());

  CHECK(log_mgf(u, 0.0) == doctest::Approx(0.0));
  CHECK(log_mgf(u, 1.0) == doctest::Approx(std::log((std::numbers::e + std::exp(2.0)) / 2.0)));
  const auto point = Pmf::initial(ModelSpec::pref_attach(0.0));
  CHECK(log_mgf(point, 0.37) == doctest::Approx(2 * 0.37));
}

TEST_CASE("recursion matches path enumeration") {
  for (const auto& m : presets()) {
    CAPTURE(m.name);
    for (std::int64_t n = 1; n <= 14; ++n) {
      const auto pmf = pmf_at(m, n);
      const auto law = enumerate_paths(m, n);
      for (std::int64_t k = pmf.k_min() - 1; k <= pmf.k_max() + 1; ++k) {
        const auto it = law.find(k);
        const double expect = it == law.end() ? 0.0 : it->second;
        REQUIRE(std::exp(pmf.log_prob(k)) == doctest::Approx(expect).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("normalization survives long recursions") {
  for (const auto& m : {ModelSpec::plane_oriented(), ModelSpec::yule(), ModelSpec::pref_attach(0.5)}) {
    CAPTURE(m.name);
    const auto p = pmf_at(m, 5000);
    CHECK(std::abs(p.log_total()) <= 1e-10);
  }
}

TEST_CASE("pmf mean follows the telescoped mean recursion") {
  for (const auto& m : presets()) {
    CAPTURE(m.name);
    const auto means = mean_sequence(m, 1000);
    Pmf p = Pmf::initial(m);
    std::vector<double> scratch;
    for (std::int64_t n = 1; n <= 1000; ++n) {
      if (n > 1) pmf_advance_inplace(p, m, scratch);
      REQUIRE(p.mean() == doctest::Approx(means[static_cast<std::size_t>(n - 1)]).epsilon(1e-9));
    }
  }
}

TEST_CASE("estimators") {
  const auto m = ModelSpec::plane_oriented();
  const auto e = pressure_estimators(m, 4000, 0.0);
  CHECK(std::abs(e.logderiv - 2.0 / 3.0) < 5e-3);
  CHECK(e.per_n == doctest::Approx(0.0));
  CHECK(e.ratio == doctest::Approx(0.0));

  const std::int64_t ns[] = {10, 50, 200};
  const double lambdas[] = {-2.0, -0.3, 0.0, 0.4, 1.5};
  const auto rows = estimator_sweep(m, ns, lambdas);
  REQUIRE(rows.size() == 15);
  std::size_t i = 0;
  for (auto n : ns) {
    double previous = -1.0;
    for (double l : lambdas) {
      const auto& row = rows[i++];
      CHECK(row.n == n);
      CHECK(row.lambda == l);
      const auto direct = pressure_estimators(m, n, l);
      CHECK(row.estimates.per_n == doctest::Approx(direct.per_n).epsilon(1e-13));
      CHECK(row.estimates.ratio == doctest::Approx(direct.ratio).epsilon(1e-13));
      CHECK(row.estimates.logderiv == doctest::Approx(direct.logderiv).epsilon(1e-13));
      CHECK(row.estimates.logderiv >= previous);  // log m_n is convex
      previous = row.estimates.logderiv;
    }
  }
  const std::int64_t unsorted[] = {50, 10};
  CHECK_THROWS_AS(estimator_sweep(m, unsorted, lambdas), std::invalid_argument);
}

TEST_CASE("logderiv is nondecreasing in lambda") {
  for (const auto& m : presets()) {
    const auto p = pmf_at(m, 300);
    double previous = -1.0;
    for (int i = -60; i <= 60; ++i) {
      const double t = tilted_mean(p, i / 10.0);
      REQUIRE(t >= previous - 1e-12);
      previous = t;
    }
  }
}

TEST_CASE("tail rates") {
  // Top of the support, every step increments: prod_{j<n} (1 - j / (3j)).
  const auto lin = ModelSpec::linear(Rational{3, 1}, 1);
  const auto p = pmf_at(lin, 10);
  CHECK(p.k_max() == 10);
  CHECK(tail_log_prob(p, 1.0) == doctest::Approx(-9.0 * std::log(2.0 / 3.0) / 10.0));
  CHECK(tail_log_prob(p, 1.0) == doctest::Approx(-p.log_prob(10) / 10.0));

  // Plane-oriented trees never reach n leaves; x = 1 reads the top atom.
  const auto plane = pmf_at(ModelSpec::plane_oriented(), 500);
  CHECK(std::abs(tail_log_prob(plane, 1.0) - std::log(2.0)) < 0.02);
  CHECK(tail_log_prob(plane, 1.2) == std::numeric_limits<double>::infinity());

  // Lower tail against enumeration.
  const auto uni = ModelSpec::uniform_recursive();
  const auto law = enumerate_paths(uni, 12);
  double below = 0.0;
  for (const auto& [k, q] : law)
    if (k <= 3) below += q;
  CHECK(tail_log_prob(pmf_at(uni, 12), 0.3) == doctest::Approx(-std::log(below) / 12.0));
  CHECK_THROWS_AS(tail_log_prob(plane, 0.0), std::invalid_argument);
}

TEST_CASE("deep tails stay finite") {
  const auto p = pmf_at(ModelSpec::plane_oriented(), 2000);
  const double lo = tail_log_prob(p, 0.05);
  CHECK(std::isfinite(lo));
  CHECK(lo * 2000 > 700);  // far below double underflow in linear space
}

TEST_CASE("states above s_n are rejected") {
  CHECK_THROWS_AS(pmf_at(ModelSpec::linear(Rational{3, 5}, 0), 5), ChainStateError);
}

TEST_CASE("active kernel") {
  MESSAGE("kernel: " << kernels::to_string(kernels::active().isa));
}
