#pragma once

#include <optional>
#include <stdexcept>
#include <string_view>

namespace leafldp {

/// Quadrature did not reach its tolerance.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double error_estimate)
      : std::runtime_error(what), error_estimate_(error_estimate) {}
  double error_estimate() const { return error_estimate_; }

 private:
  double error_estimate_;
};

/// The Legendre root lies beyond |lambda| = kRateBracketCap.
class RateBracketError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class PressureMethod { closed_form_half, closed_form_one, closed_form_two, quadrature };

std::string_view to_string(PressureMethod method);

/// Below this |lambda| every method uses the second-order Taylor expansion.
inline constexpr double kTaylorSwitch = 1e-4;
inline constexpr double kRateBracketCap = 50.0;

/// alpha / (alpha + 1)
double lln_mean(double alpha);
/// alpha^2 / ((1 + alpha)^2 (2 + alpha))
double clt_variance(double alpha);

/// Evaluator of the pressure
///   Lambda(lambda) = -log[ alpha / (e^lambda - 1) int_0^lambda
///                          ((e^s - 1) / (e^lambda - 1))^(alpha - 1) ds ]
/// by closed form (alpha = 1/2, 1, 2) or by quadrature (any alpha > 0).
/// Immutable; safe to share across threads.
class PressureEval {
 public:
  /// Closed form when one exists for alpha, quadrature otherwise.
  explicit PressureEval(double alpha, double quad_tol = 1e-13);
  /// Throws std::invalid_argument if `method` is a closed form that does not
  /// match alpha.
  PressureEval(double alpha, PressureMethod method, double quad_tol = 1e-13);

  static PressureEval quadrature(double alpha, double quad_tol = 1e-13) {
    return {alpha, PressureMethod::quadrature, quad_tol};
  }

  double alpha() const { return alpha_; }
  PressureMethod method() const { return method_; }
  double quad_tol() const { return quad_tol_; }
  /// True for alpha in (0, 1) other than 1/2, where the integral formula is
  /// evaluated without a known derivation.
  bool extrapolated() const;

 private:
  double alpha_;
  PressureMethod method_;
  double quad_tol_;
};

double pressure(const PressureEval& ev, double lambda);

struct PressureDerivatives {
  double first;
  double second;
};

/// Analytic derivatives of the closed forms; for quadrature, the integral is
/// differentiated under the integral sign. At lambda = 0 returns exactly
/// (lln_mean, clt_variance).
PressureDerivatives pressure_derivatives(const PressureEval& ev, double lambda);

/// e^Lambda - (1 - e^lambda) Lambda' / alpha - e^lambda, which vanishes for the
/// true pressure.
double ode_residual(const PressureEval& ev, double lambda);

/// A point of the rate function I(x) = sup_lambda {lambda x - Lambda(lambda)}.
struct RatePoint {
  double x;
  double lambda_star;  // +inf at the right end of the support
  double rate;         // +inf outside the support
};

/// Solves Lambda'(lambda*) = x for x in (0, 1). The right end of the support
/// is handled by the large-lambda asymptote of Lambda:
///   alpha > 1, x = 1:     I = log(alpha / (alpha - 1))
///   alpha = 1, x = 1:     I = +inf
///   alpha < 1, x = alpha: I = log(pi alpha / sin(pi alpha)); x > alpha: +inf
/// Throws std::invalid_argument for x outside (0, 1] and RateBracketError when
/// |lambda*| > kRateBracketCap.
RatePoint rate(const PressureEval& ev, double x);

}  // namespace leafldp
