#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace leafldp {

/// (x, y) outside the domain of the local cost, or an inadmissible path.
class PathDomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Shooting failed: no initial slope reaches the target, or the integrator's
/// step collapsed.
class EulerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// L(alpha t, x, y) = y log(alpha t y / (alpha t - x))
///                    + (1 - y) log(alpha t (1 - y) / x),
/// with 0 log 0 = 0. +inf when x = 0 and y < 1, or x = alpha t and y > 0.
/// Requires t in (0, 1], y in [0, 1], 0 <= x <= alpha t.
double local_cost(double t, double x, double y, double alpha);

/// Piecewise-linear phi on [0, 1] with phi(0) = 0, slopes in [0, 1] and
/// phi(t) <= t.
class PathFunction {
 public:
  /// knots strictly increasing from 0 to 1. Slopes within 1e-12 of [0, 1] and
  /// values within 1e-12 of t are clamped; anything further is rejected with
  /// PathDomainError.
  PathFunction(std::vector<double> knots, std::vector<double> values);

  /// phi(t) = slope t.
  static PathFunction line(double slope);

  const std::vector<double>& knots() const { return knots_; }
  const std::vector<double>& values() const { return values_; }
  std::size_t pieces() const { return knots_.size() - 1; }
  double end_value() const { return values_.back(); }

  double operator()(double t) const;
  /// Slope of the piece containing t (the right piece at a knot, the last at 1).
  double slope_at(double t) const;
  double slope(std::size_t piece) const { return slopes_[piece]; }

  /// Same function with the midpoint of every piece inserted as a knot.
  PathFunction refined() const;

 private:
  std::size_t piece_of(double t) const;

  std::vector<double> knots_;
  std::vector<double> values_;
  std::vector<double> slopes_;
};

/// I(phi) = int_0^1 L(alpha t, phi(t), phi'(t)) dt, integrated piece by piece
/// (the first piece through the origin has a constant integrand). +inf when a
/// divergence case holds on a piece of positive length. Accepts any alpha > 0;
/// the LDP behind it is established for alpha > 1.
double path_rate(const PathFunction& phi, double alpha);

struct EulerOptions {
  double tol = 1e-10;          // |phi(1) - x_target|
  double eps = 1e-6;           // start of integration
  double rtol = 1e-11;
  double atol = 1e-13;
  std::size_t grid_points = 1001;
  std::size_t scan_points = 81;
};

struct EulerSolution {
  double alpha = 0.0;
  double x_target = 0.0;
  PathFunction path = PathFunction::line(0.0);
  std::vector<double> t;       // uniform grid on [0, 1]
  std::vector<double> phi;
  std::vector<double> phidot;
  double cost = 0.0;           // cost integrated along the ODE solution
  double polyline_cost = 0.0;  // path_rate of the sampled polyline
  double shoot_param = 0.0;    // initial slope phi'(eps)
  double terminal_error = 0.0;
  std::vector<double> roots;   // every initial slope found to hit the target
  bool monotone = true;        // phi(1) increasing over the scanned slopes
  std::size_t steps = 0;

  /// max_t |phi(t) - x_target t| over the grid.
  double chord_deviation() const;
};

/// Solves phi'' = phi' (1 - phi') [alpha / (alpha t - phi) - 1 / phi],
/// phi(0) = 0, phi(1) = x_target, by shooting from t = eps on the branch that
/// leaves 0 with the law-of-large-numbers slope alpha / (alpha + 1) plus the
/// growing mode t^mu, mu (mu - 1) = (alpha + 1) / alpha^2. The shooting
/// parameter is the initial slope phi'(eps). Requires alpha > 1 and x_target
/// in (0, 1).
EulerSolution euler_solve(double alpha, double x_target, const EulerOptions& options = {});

}  // namespace leafldp
