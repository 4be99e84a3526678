#include <doctest.h>

#include <cmath>
#include <random>

#include "leafldp/path.hpp"
#include "leafldp/pressure.hpp"

using namespace leafldp;

namespace {

// Random admissible polyline with phi(1) = x: slopes in (0, 1), rescaled.
PathFunction random_path(std::mt19937_64& gen, double x) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (;;) {
    const int pieces = 2 + static_cast<int>(unit(gen) * 6);
    std::vector<double> knots{0.0};
    for (int i = 1; i < pieces; ++i) knots.push_back(unit(gen));
    knots.push_back(1.0);
    std::sort(knots.begin(), knots.end());
    std::vector<double> slopes;
    double end = 0.0;
    for (int i = 0; i < pieces; ++i) {
      slopes.push_back(0.02 + 0.96 * unit(gen));
      end += slopes.back() * (knots[i + 1] - knots[i]);
    }
    bool ok = true;
    for (auto& s : slopes) {
      s *= x / end;
      ok = ok && s > 1e-6 && s < 1.0 - 1e-6;
    }
    bool distinct = true;
    for (int i = 0; i < pieces; ++i) distinct = distinct && knots[i + 1] > knots[i];
    if (!ok || !distinct) continue;
    std::vector<double> values{0.0};
    for (int i = 0; i < pieces; ++i) values.push_back(values.back() + slopes[i] * (knots[i + 1] - knots[i]));
    return PathFunction(knots, values);
  }
}

}  // namespace

TEST_CASE("local cost") {
  CHECK(local_cost(1.0, 1.0, 0.5, 2.0) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(local_cost(1.0, 0.25, 0.5, 1.0) ==
        doctest::Approx(0.5 * std::log(2.0 / 3.0) + 0.5 * std::log(2.0)).epsilon(1e-15));
  CHECK(std::isinf(local_cost(0.5, 0.0, 0.3, 2.0)));
  CHECK(std::isinf(local_cost(0.5, 1.0, 0.3, 2.0)));  // x = alpha t with y > 0
  CHECK(local_cost(0.5, 0.0, 1.0, 2.0) == doctest::Approx(std::log(1.0 / 1.0 * 1.0)));
  CHECK_THROWS_AS(local_cost(0.5, 0.2, 1.5, 2.0), PathDomainError);
}

TEST_CASE("path rate of straight lines") {
  CHECK(path_rate(PathFunction::line(2.0 / 3.0), 2.0) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(path_rate(PathFunction::line(1.0), 2.0) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(path_rate(PathFunction::line(0.5), 2.0) == doctest::Approx(0.5 * std::log(4.0 / 3.0)).epsilon(1e-12));
  CHECK(std::isinf(path_rate(PathFunction::line(0.0), 2.0)));
  CHECK(path_rate(PathFunction::line(0.5), 1.0) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("path rate is invariant under knot refinement") {
  std::mt19937_64 gen(17);
  for (int i = 0; i < 40; ++i) {
    const auto phi = random_path(gen, 0.2 + 0.6 * (i % 7) / 6.0);
    const double a = path_rate(phi, 2.0);
    const double b = path_rate(phi.refined(), 2.0);
    REQUIRE(std::abs(a - b) <= 1e-10);
  }
}

TEST_CASE("path function validation") {
  CHECK_THROWS_AS(PathFunction({0.0, 0.5, 1.0}, {0.1, 0.2, 0.3}), PathDomainError);   // phi(0) != 0
  CHECK_THROWS_AS(PathFunction({0.0, 0.5, 0.5, 1.0}, {0, 0.1, 0.2, 0.3}), PathDomainError);
  CHECK_THROWS_AS(PathFunction({0.0, 0.5, 1.0}, {0.0, 0.4, 0.2}), PathDomainError);  // slope < 0
  CHECK_THROWS_AS(PathFunction({0.0, 0.1, 1.0}, {0.0, 0.3, 0.5}), PathDomainError);  // slope > 1
  const PathFunction p({0.0, 0.5, 1.0}, {0.0, 0.25, 0.75});
  CHECK(p(0.25) == doctest::Approx(0.125));
  CHECK(p.slope_at(0.5) == doctest::Approx(1.0));
  CHECK(p.end_value() == 0.75);
}

TEST_CASE("Euler solution at the LLN endpoint is the straight line") {
  const auto s = euler_solve(2.0, 2.0 / 3.0);
  CHECK(std::abs(s.cost) < 1e-9);
  CHECK(s.chord_deviation() < 1e-6);
}

TEST_CASE("Euler cost matches the Legendre rate") {
  const PressureEval ev(2.0);
  for (int i = 1; i <= 19; ++i) {
    const double x = 0.05 * i;
    CAPTURE(x);
    const auto s = euler_solve(2.0, x);
    REQUIRE(s.cost >= 0.0);
    REQUIRE(std::abs(s.cost - rate(ev, x).rate) <= 1e-3);
    REQUIRE(std::abs(s.polyline_cost - s.cost) <= 1e-3);
    REQUIRE(s.terminal_error <= 1e-9);
    REQUIRE_FALSE(s.roots.empty());
    // Interior: 0 < phi(t) < min(t, alpha t) for t in (0, 1).
    for (std::size_t k = 1; k + 1 < s.t.size(); ++k) {
      REQUIRE(s.phi[k] > 0.0);
      REQUIRE(s.phi[k] < s.t[k]);
    }
  }
}

TEST_CASE("optimal paths bend away from the chord") {
  for (double x : {0.13, 0.85}) {
    const auto s = euler_solve(2.0, x);
    CHECK(s.chord_deviation() > 1e-3);
    // Early on the path hugs the LLN line 2t/3.
    CHECK(std::abs(s.phidot[1] - 2.0 / 3.0) < 0.05);
  }
}

TEST_CASE("Euler cost approaches log 2 near the right end") {
  const PressureEval ev(2.0);
  double previous_gap = 1.0;
  for (double x : {0.95, 0.99, 0.995}) {
    const auto s = euler_solve(2.0, x);
    CHECK(std::abs(s.cost - rate(ev, x).rate) <= 1e-3);
    const double gap = std::log(2.0) - s.cost;
    CHECK(gap > 0.0);
    CHECK(gap < previous_gap);
    previous_gap = gap;
  }
}

TEST_CASE("other alpha") {
  for (double a : {1.5, 3.0}) {
    const PressureEval ev(a);
    for (double x : {0.2, 0.5, 0.8}) {
      const auto s = euler_solve(a, x);
      CHECK(std::abs(s.cost - rate(ev, x).rate) <= 1e-3);
    }
  }
}

TEST_CASE("random polylines never beat the Euler cost") {
  std::mt19937_64 gen(2718);
  for (double x : {0.13, 0.5, 0.85}) {
    const double best = euler_solve(2.0, x).cost;
    for (int i = 0; i < 100; ++i) REQUIRE(path_rate(random_path(gen, x), 2.0) >= best - 1e-3);
  }
}

TEST_CASE("Euler argument checks") {
  CHECK_THROWS_AS(euler_solve(1.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(euler_solve(2.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(euler_solve(2.0, 0.0), std::invalid_argument);
}
