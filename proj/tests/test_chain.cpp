#include <doctest.h>

#include <cmath>
#include <set>

#include "leafldp/chain.hpp"
#include "leafldp/model.hpp"
#include "leafldp/rng.hpp"

using namespace leafldp;

namespace {

std::vector<ModelSpec> presets() {
  return {ModelSpec::uniform_recursive(),
          ModelSpec::plane_oriented(),
          ModelSpec::yule(),
          ModelSpec::pref_attach(Rational{0, 1}),
          ModelSpec::pref_attach(Rational{1, 2}),
          ModelSpec::pref_attach(Rational{-1, 2}),
          ModelSpec::linear(Rational{3, 2}, 1),
          ModelSpec::randomized_pa(Rational{0, 1}, GammaPmf({{1, 0.5}, {2, 0.5}}), 11)};
}

}  // namespace

TEST_CASE("slope sequences of the presets") {
  CHECK(ModelSpec::plane_oriented().slope(3) == 5.0);
  CHECK(ModelSpec::yule().slope(4) == 2.0);
  CHECK(ModelSpec::pref_attach(0.0).slope(2) == 4.0);
  CHECK(ModelSpec::uniform_recursive().slope(7) == 7.0);
  // (dG1 + 2(n-1) + (n-1+vG1) beta) / (1 + beta) at beta = 1/2, n = 3
  CHECK(ModelSpec::pref_attach(Rational{1, 2}).slope(3) == doctest::Approx((2 + 4 + 4 * 0.5) / 1.5));
  CHECK(ModelSpec::pref_attach(Rational{1, 2}).alpha() == doctest::Approx((2 + 0.5) / 1.5));
  CHECK(ModelSpec::yule().k0 == 0);
  CHECK(ModelSpec::pref_attach(0.0).k0 == 2);
}

TEST_CASE("randomized PA slopes use the partial sums of gamma") {
  const GammaPmf g({{1, 0.5}, {2, 0.5}});
  const auto a = ModelSpec::randomized_pa(0.0, g, 99);
  const auto b = ModelSpec::randomized_pa(0.0, g, 99);
  const auto c = ModelSpec::randomized_pa(0.0, g, 100);
  CHECK(a.alpha() == doctest::Approx(3.0));
  bool differs = false;
  for (std::int64_t n = 1; n <= 2000; ++n) {
    REQUIRE(a.slope(n) == b.slope(n));  // bit-identical
    differs = differs || a.slope(n) != c.slope(n);
    const auto gi = a.slopes.gamma(n);
    CHECK((gi == 1 || gi == 2));
    // beta = 0: s_n = 2 + 2 sum_{i<n} gamma_i
    CHECK(a.slope(n) == 2.0 + 2.0 * static_cast<double>(a.slopes.gamma_prefix(n)));
  }
  CHECK(differs);
}

TEST_CASE("model strings") {
  CHECK(parse_model("plane_oriented").slopes.kind() == SlopeKind::plane_oriented);
  CHECK(parse_model("uniform").slopes.kind() == SlopeKind::uniform_recursive);
  CHECK(parse_model("yule").k0 == 0);
  const auto pa = parse_model("pa:beta=1/2");
  CHECK(pa.slopes.slope().exact == Rational{1, 2});
  const auto lin = parse_model("linear:alpha=3,k0=1");
  CHECK(lin.alpha() == 3.0);
  CHECK(lin.k0 == 1);
  const auto rpa = parse_model("rpa:beta=0,gamma=1:0.5+2:0.5,seed=5");
  CHECK(rpa.slopes.kind() == SlopeKind::randomized_pa);
  CHECK(rpa.slopes.gamma_seed() == 5);
  CHECK_THROWS_AS(parse_model("nope"), ModelError);
  CHECK_THROWS_AS(parse_model("pa"), ModelError);
  CHECK_THROWS_AS(parse_model("pa:beta=-1"), ModelError);
  CHECK_THROWS_AS(parse_model("linear:alpha=3"), ModelError);
  CHECK_THROWS_AS(parse_model("yule:k0=3"), ModelError);
  CHECK_THROWS_AS(parse_model("linear:alpha=0.5,k0=1"), ModelError);  // k0 > s_1
}

TEST_CASE("increment probability") {
  const auto plane = ModelSpec::plane_oriented();
  const auto yule = ModelSpec::yule();
  const auto uniform = ModelSpec::uniform_recursive();
  CHECK(increment_probability(plane, 1, 1) == 0.0);
  CHECK(increment_probability(yule, 1, 0) == 1.0);  // 0/0 counts as 0
  CHECK(increment_probability(uniform, 2, 1) == 0.5);
  CHECK_THROWS_AS(increment_probability(plane, 2, 4), ChainStateError);

  CounterRng rng(1234);
  const int draws = 1'000'000;
  int up = 0;
  for (int i = 0; i < draws; ++i) up += step(uniform, 2, 1, rng) == 2;
  CHECK(std::abs(up / double(draws) - 0.5) < 5 * 0.5 / std::sqrt(double(draws)));

  CounterRng r2(1);
  CHECK(step(plane, 1, 1, r2) == 1);
  CHECK(step(yule, 1, 0, r2) == 1);
  CHECK_THROWS_AS(step(plane, 3, 7, r2), ChainStateError);
}

TEST_CASE("early deterministic steps") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto p = simulate(ModelSpec::plane_oriented(), 2, seed);
    CHECK(p.values == std::vector<std::int64_t>{1, 1});
    const auto y = simulate(ModelSpec::yule(), 3, seed);
    CHECK(y.values == std::vector<std::int64_t>{0, 1, 1});
  }
}

TEST_CASE("trajectories are unit-increment and bounded") {
  for (const auto& model : presets()) {
    CAPTURE(model.name);
    for (std::uint64_t rep = 0; rep < 20; ++rep) {
      const auto traj = simulate(model, 400, 77, rep);
      REQUIRE(traj.at(1) == model.k0);
      for (std::int64_t j = 2; j <= traj.length(); ++j) {
        const auto d = traj.at(j) - traj.at(j - 1);
        REQUIRE((d == 0 || d == 1));
        REQUIRE(static_cast<double>(traj.at(j)) <= model.slope(j) + 1e-9);
        REQUIRE(traj.at(j) <= model.k0 + j - 1);
      }
      REQUIRE(simulate_final(model, 400, 77, rep) == traj.at(400));
    }
  }
}

TEST_CASE("simulation is reproducible per (seed, replicate)") {
  const auto m = ModelSpec::plane_oriented();
  CHECK(simulate(m, 1000, 5, 3).values == simulate(m, 1000, 5, 3).values);
  CHECK(simulate(m, 1000, 5, 3).values != simulate(m, 1000, 5, 4).values);
  CHECK(simulate(m, 1000, 5, 3).values != simulate(m, 1000, 6, 3).values);
}

TEST_CASE("a slope sequence that falls below the state is reported") {
  // s_3 = 1.8 < 2 = a reachable Z_3.
  const auto m = ModelSpec::linear(Rational{3, 5}, 0);
  bool thrown = false;
  for (std::uint64_t rep = 0; rep < 200 && !thrown; ++rep) {
    try {
      simulate(m, 5, 1, rep);
    } catch (const ChainStateError&) {
      thrown = true;
    }
  }
  CHECK(thrown);
}

TEST_CASE("interpolation") {
  const auto plane = ModelSpec::plane_oriented();
  const auto traj = simulate(plane, 100, 3);
  CHECK(interpolate(traj, 0.005) == 0.005);  // X(t) = t below k0 / N

  const Trajectory small{plane, {1, 1, 2}};
  CHECK(interpolate(small, 2.0 / 3.0) == doctest::Approx(1.0 / 3.0));
  CHECK(interpolate(small, 1.0) == doctest::Approx(2.0 / 3.0));
  CHECK_THROWS(interpolate(small, 1.5));

  // Lipschitz-1 on a grid of pairs.
  const auto long_traj = simulate(plane, 500, 8);
  std::vector<double> ts;
  for (int i = 0; i <= 400; ++i) ts.push_back(i / 400.0);
  for (double a : ts)
    for (double b : ts)
      REQUIRE(std::abs(interpolate(long_traj, a) - interpolate(long_traj, b)) <= std::abs(a - b) + 1e-15);
}

TEST_CASE("counter rng") {
  CounterRng a(42, 3);
  const CounterRng b(42, 3);
  for (std::uint64_t i = 0; i < 100; ++i) CHECK(a() == b.at(i));
  CHECK(CounterRng(42, 3).at(0) != CounterRng(42, 4).at(0));
  CounterRng c(9);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 3000; ++i) {
    const auto v = c.below(3);
    REQUIRE(v < 3);
    seen.insert(v);
  }
  CHECK(seen.size() == 3);
  for (int i = 0; i < 1000; ++i) {
    const double u = c.uniform();
    REQUIRE((u >= 0.0 && u < 1.0));
  }
}
