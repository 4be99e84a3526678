#include <doctest.h>

#include <cmath>

#include "leafldp/chain.hpp"
#include "leafldp/exact_poly.hpp"
#include "leafldp/pmf.hpp"

using namespace leafldp;

namespace {

ExactPoly poly(std::vector<mpq_class> c) { return {0, std::move(c)}; }

std::vector<ModelSpec> exact_presets() {
  return {ModelSpec::uniform_recursive(),
          ModelSpec::plane_oriented(),
          ModelSpec::yule(),
          ModelSpec::pref_attach(Rational{0, 1}),
          ModelSpec::pref_attach(Rational{1, 2}),
          ModelSpec::pref_attach(Rational{-1, 2}),
          ModelSpec::linear(Rational{3, 1}, 1),
          ModelSpec::linear(Rational{5, 2}, 2),
          ModelSpec::randomized_pa(Rational{0, 1}, GammaPmf({{1, 0.5}, {2, 0.5}}), 7)};
}

}  // namespace

TEST_CASE("small generating polynomials") {
  const auto lin = exact_poly(ModelSpec::linear(Rational{3, 1}, 1), 2);
  REQUIRE(lin.coeffs.size() == 3);
  CHECK(lin.coeffs[0] == 0);
  CHECK(lin.coeffs[1] == mpq_class(1, 3));
  CHECK(lin.coeffs[2] == mpq_class(2, 3));

  const auto plane = exact_poly(ModelSpec::plane_oriented(), 2);
  REQUIRE(plane.degree() == 1);
  CHECK(plane.coeffs[1] == 1);

  const auto uni = exact_poly(ModelSpec::uniform_recursive(), 3);
  REQUIRE(uni.degree() == 2);
  CHECK(uni.coeffs[1] == mpq_class(1, 2));
  CHECK(uni.coeffs[2] == mpq_class(1, 2));

  CHECK(exact_slope(SlopeSequence::yule(), 3) == mpq_class(3, 2));
  CHECK(exact_slope(SlopeSequence::pref_attach(Rational{1, 2}), 3) == mpq_class(16, 3));
}

TEST_CASE("Sturm certification of known polynomials") {
  // (2u^2 + u) / 3 = u (2u + 1) / 3
  auto r = certify_real_rooted(poly({0, mpq_class(1, 3), mpq_class(2, 3)}));
  CHECK(r.real_rooted);
  CHECK(r.zero_multiplicity == 1);
  CHECK(r.negative_roots == 1);

  CHECK_FALSE(certify_real_rooted(poly({1, 0, 1})).real_rooted);       // u^2 + 1
  CHECK_FALSE(certify_real_rooted(poly({-1, 0, 1})).real_rooted);      // root at +1
  CHECK_FALSE(certify_real_rooted(poly({0, 1, 1, 1})).real_rooted);    // u (u^2 + u + 1)

  // (u + 1)^2 (u + 2) = u^3 + 4u^2 + 5u + 2
  r = certify_real_rooted(poly({2, 5, 4, 1}));
  CHECK(r.real_rooted);
  CHECK(r.negative_roots == 3);
  CHECK(r.distinct_negative_roots == 2);
  CHECK_FALSE(r.negatives_simple());

  // 3 u^4
  r = certify_real_rooted(poly({0, 0, 0, 0, 3}));
  CHECK(r.real_rooted);
  CHECK(r.monomial);
  CHECK(r.zero_multiplicity == 4);

  // (u + 1/3)(u + 1/2)(u + 7) u^2 with rational coefficients
  const mpq_class a(1, 3), b(1, 2), c(7);
  r = certify_real_rooted(poly({0, 0, a * b * c, a * b + a * c + b * c, a + b + c, 1}));
  CHECK(r.real_rooted);
  CHECK(r.zero_multiplicity == 2);
  CHECK(r.distinct_negative_roots == 3);

  CHECK_THROWS_AS(certify_real_rooted(poly({0, 0})), std::invalid_argument);
}

TEST_CASE("every preset is real-rooted with the predicted root layout") {
  for (const auto& m : exact_presets()) {
    CAPTURE(m.name);
    for (std::int64_t n = 1; n <= 30; ++n) {
      CAPTURE(n);
      const auto c = certify_model(m, n);
      REQUIRE(c.passed);
      REQUIRE(c.report.real_rooted);
      REQUIRE(c.report.negatives_simple());
    }
  }
  const auto c = certify_model(ModelSpec::plane_oriented(), 10);
  CHECK(c.report.degree == 9);
  CHECK(c.report.zero_multiplicity == 1);
  CHECK(c.report.negative_roots == 8);
}

TEST_CASE("exact coefficients agree with the float recursion") {
  for (const auto& m : exact_presets()) {
    CAPTURE(m.name);
    for (std::int64_t n = 1; n <= 30; ++n) {
      const auto e = exact_poly(m, n);
      CHECK(e.sum() == 1);
      const auto p = pmf_at(m, n);
      for (std::int64_t k = 0; k < static_cast<std::int64_t>(e.coeffs.size()); ++k) {
        const double exact = e.coeffs[static_cast<std::size_t>(k)].get_d();
        const double flt = std::exp(p.log_prob(k));
        REQUIRE(flt == doctest::Approx(exact).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("a frozen first step is reported as a monomial") {
  // s_1 = k0 = 1, so p_2(u) = u.
  const auto m = ModelSpec::plane_oriented();
  const auto c = certify_model(m, 2);
  CHECK(c.report.monomial);
  CHECK(c.expected.monomial);
  CHECK(c.passed);
}

TEST_CASE("rejections") {
  CHECK_THROWS_AS(exact_poly(ModelSpec::pref_attach(Param(0.3)), 5), InexactModelError);
  CHECK_THROWS_AS(exact_poly(ModelSpec::plane_oriented(), 41), std::invalid_argument);
  CHECK_NOTHROW(exact_poly(ModelSpec::plane_oriented(), 45, 50));
  CHECK_THROWS_AS(exact_poly(ModelSpec::linear(Rational{3, 5}, 0), 5), ChainStateError);
}
