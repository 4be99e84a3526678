#include "leafldp/pressure.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/roots.hpp>
#include <fmt/format.h>

namespace leafldp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool near(double a, double b) { return std::abs(a - b) <= 1e-15 * std::max(1.0, std::abs(b)); }

// e^x - 1 - x without cancellation near 0.
double expm1_minus_x(double x) {
  if (std::abs(x) > 0.5) return std::expm1(x) - x;
  double term = x * x / 2.0;
  double sum = term;
  for (int k = 3; k < 40 && std::abs(term) > 1e-18 * std::abs(sum); ++k) {
    term *= x / k;
    sum += term;
  }
  return sum;
}

struct Value3 {
  double value;
  double first;
  double second;
};

Value3 taylor(double alpha, double lambda) {
  const double m = lln_mean(alpha);
  const double v = clt_variance(alpha);
  return {m * lambda + 0.5 * v * lambda * lambda, m + v * lambda, v};
}

Value3 closed_one(double l) {
  const double d = std::expm1(l);
  const double el = std::exp(l);
  return {std::log(d / l), el / d - 1.0 / l, 1.0 / (l * l) - el / (d * d)};
}

Value3 closed_two(double l) {
  const double d = std::expm1(l);
  const double e = expm1_minus_x(l);
  const double el = std::exp(l);
  const double value = 2.0 * std::log(std::abs(d)) - std::numbers::ln2 - std::log(e);
  const double first = 2.0 * el / d - d / e;
  const double second = 2.0 * el / d - 2.0 * el * el / (d * d) - el / e + d * d / (e * e);
  return {value, first, second};
}

Value3 closed_half(double l) {
  const double d = std::expm1(l);
  const double el = std::exp(l);
  const double w = std::sqrt(std::abs(d));
  double arc;  // atan(w) for lambda > 0, atanh(w) for lambda < 0
  double g;
  if (l > 0.0) {
    arc = std::atan(w);
    g = w * arc;
  } else {
    // 1 - w = e^lambda / (1 + w), so atanh(w) = log1p(w) - lambda / 2.
    arc = std::log1p(w) - 0.5 * l;
    g = -w * arc;
  }
  const double dg = el * arc / (2.0 * w) + 0.5;
  return {std::log(w / arc), el / (2.0 * d) - 1.0 / (2.0 * g),
          -el / (2.0 * d * d) + dg / (2.0 * g * g)};
}

// Non-const: in Boost 1.74 the two-argument integrate overload is declared
// const but defined without the qualifier.
boost::math::quadrature::tanh_sinh<double>& integrator() {
  static boost::math::quadrature::tanh_sinh<double> q;
  return q;
}

// J = int_0^1 dw / (1 + c w^(1/alpha)) and its first two c-derivatives,
// c = e^lambda - 1. The substitutions v = (e^s - 1) / c, w = v^alpha turn
// the pressure integral into this form with no endpoint singularity.
Value3 quadrature_j(double alpha, double lambda, double tol, bool derivatives) {
  const double c = std::expm1(lambda);
  const double el = std::exp(lambda);
  const double inv_alpha = 1.0 / alpha;
  // t = w^(1/alpha) and 1 + c t, using the distance to w = 1 when close to it
  // (the mass concentrates there as lambda -> -inf).
  auto point = [=](double w, double wc, double& t, double& den) {
    if (wc >= 0.0 && c < 0.0) {
      const double tm1 = std::expm1(std::log1p(-wc) * inv_alpha);
      t = 1.0 + tm1;
      den = el + c * tm1;
    } else {
      t = std::pow(w, inv_alpha);
      den = 1.0 + c * t;
    }
  };
  auto run = [&](auto f, const char* what) {
    double err = 0.0;
    double l1 = 0.0;
    const double v = integrator().integrate(f, 0.0, 1.0, tol, &err, &l1);
    if (!(err <= std::sqrt(tol) * l1) || !std::isfinite(v))
      throw QuadratureError(
          fmt::format("quadrature for {} did not converge (alpha={}, lambda={}, error {:.3g})",
                      what, alpha, lambda, err),
          err);
    return v;
  };
  Value3 out{};
  out.value = run(
      [&](double w, double wc) {
        double t, den;
        point(w, wc, t, den);
        return 1.0 / den;
      },
      "J");
  if (!derivatives) return out;
  out.first = -run(
      [&](double w, double wc) {
        double t, den;
        point(w, wc, t, den);
        return t / (den * den);
      },
      "dJ/dc");
  out.second = 2.0 * run(
      [&](double w, double wc) {
        double t, den;
        point(w, wc, t, den);
        return t * t / (den * den * den);
      },
      "d2J/dc2");
  return out;
}

Value3 evaluate(const PressureEval& ev, double lambda, bool derivatives) {
  if (!std::isfinite(lambda)) throw std::invalid_argument("pressure: lambda must be finite");
  if (lambda == 0.0) return {0.0, lln_mean(ev.alpha()), clt_variance(ev.alpha())};
  if (std::abs(lambda) < kTaylorSwitch) return taylor(ev.alpha(), lambda);
  switch (ev.method()) {
    case PressureMethod::closed_form_half: return closed_half(lambda);
    case PressureMethod::closed_form_one: return closed_one(lambda);
    case PressureMethod::closed_form_two: return closed_two(lambda);
    case PressureMethod::quadrature: break;
  }
  const Value3 j = quadrature_j(ev.alpha(), lambda, ev.quad_tol(), derivatives);
  const double el = std::exp(lambda);
  const double r = j.first * el / j.value;  // d log J / d lambda
  return {-std::log(j.value), -r,
          -(j.second * el * el + j.first * el) / j.value + r * r};
}

}  // namespace

std::string_view to_string(PressureMethod method) {
  switch (method) {
    case PressureMethod::closed_form_half: return "closed_form_half";
    case PressureMethod::closed_form_one: return "closed_form_one";
    case PressureMethod::closed_form_two: return "closed_form_two";
    case PressureMethod::quadrature: return "quadrature";
  }
  return "unknown";
}

double lln_mean(double alpha) { return alpha / (alpha + 1.0); }

double clt_variance(double alpha) {
  return alpha * alpha / ((1.0 + alpha) * (1.0 + alpha) * (2.0 + alpha));
}

PressureEval::PressureEval(double alpha, double quad_tol)
    : PressureEval(alpha,
                   near(alpha, 0.5)   ? PressureMethod::closed_form_half
                   : near(alpha, 1.0) ? PressureMethod::closed_form_one
                   : near(alpha, 2.0) ? PressureMethod::closed_form_two
                                      : PressureMethod::quadrature,
                   quad_tol) {}

PressureEval::PressureEval(double alpha, PressureMethod method, double quad_tol)
    : alpha_(alpha), method_(method), quad_tol_(quad_tol) {
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw std::invalid_argument("pressure: alpha must be a positive finite number");
  if (!(quad_tol > 0.0) || quad_tol >= 1.0)
    throw std::invalid_argument("pressure: quad_tol must lie in (0, 1)");
  const bool ok = method == PressureMethod::quadrature ||
                  (method == PressureMethod::closed_form_half && near(alpha, 0.5)) ||
                  (method == PressureMethod::closed_form_one && near(alpha, 1.0)) ||
                  (method == PressureMethod::closed_form_two && near(alpha, 2.0));
  if (!ok)
    throw std::invalid_argument(
        fmt::format("pressure: {} is not available for alpha = {}", to_string(method), alpha));
}

bool PressureEval::extrapolated() const { return alpha_ < 1.0 && !near(alpha_, 0.5); }

double pressure(const PressureEval& ev, double lambda) {
  return evaluate(ev, lambda, false).value;
}

PressureDerivatives pressure_derivatives(const PressureEval& ev, double lambda) {
  const Value3 v = evaluate(ev, lambda, true);
  return {v.first, v.second};
}

double ode_residual(const PressureEval& ev, double lambda) {
  const Value3 v = evaluate(ev, lambda, true);
  return std::exp(v.value) + std::expm1(lambda) * v.first / ev.alpha() - std::exp(lambda);
}

RatePoint rate(const PressureEval& ev, double x) {
  if (!(x > 0.0 && x <= 1.0))
    throw std::invalid_argument(fmt::format("rate: x = {} is outside (0, 1]", x));
  const double alpha = ev.alpha();
  const double mean = lln_mean(alpha);
  if (x == mean) return {x, 0.0, 0.0};

  const double top = std::min(alpha, 1.0);
  if (x > top) return {x, kInf, kInf};
  if (x == top) {
    if (alpha > 1.0) return {x, kInf, std::log(alpha / (alpha - 1.0))};
    if (alpha == 1.0) return {x, kInf, kInf};
    return {x, kInf, std::log(std::numbers::pi * alpha / std::sin(std::numbers::pi * alpha))};
  }

  auto slope_gap = [&](double l) { return pressure_derivatives(ev, l).first - x; };
  const double dir = x > mean ? 1.0 : -1.0;
  double inner = 0.0;
  double outer = dir;
  while (slope_gap(outer) * dir < 0.0) {
    if (std::abs(outer) >= kRateBracketCap)
      throw RateBracketError(fmt::format(
          "rate: lambda* for x = {} lies beyond |lambda| = {} (alpha = {})", x, kRateBracketCap,
          alpha));
    inner = outer;
    outer = dir * std::min(2.0 * std::abs(outer), kRateBracketCap);
  }
  double lo = std::min(inner, outer);
  double hi = std::max(inner, outer);
  std::uintmax_t iters = 200;
  const auto [a, b] = boost::math::tools::toms748_solve(
      slope_gap, lo, hi, boost::math::tools::eps_tolerance<double>(50), iters);
  const double ls = 0.5 * (a + b);
  return {x, ls, ls * x - pressure(ev, ls)};
}

}  // namespace leafldp
