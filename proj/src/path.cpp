#include "leafldp/path.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/numeric/odeint.hpp>
#include <fmt/format.h>

namespace leafldp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kClamp = 1e-12;

// y log(T y / (T - x)) + (1 - y) log(T (1 - y) / x), T = alpha t, with no
// argument checks.
double cost_unchecked(double T, double x, double y) {
  double out = 0.0;
  if (y > 0.0) {
    if (x >= T) return kInf;
    out += y * std::log(T * y / (T - x));
  }
  if (y < 1.0) {
    if (x <= 0.0) return kInf;
    out += (1.0 - y) * std::log(T * (1.0 - y) / x);
  }
  return out;
}

boost::math::quadrature::tanh_sinh<double>& integrator() {
  static boost::math::quadrature::tanh_sinh<double> q;
  return q;
}

}  // namespace

double local_cost(double t, double x, double y, double alpha) {
  if (!(t > 0.0 && t <= 1.0)) throw PathDomainError(fmt::format("local_cost: t = {} not in (0, 1]", t));
  if (!(y >= 0.0 && y <= 1.0)) throw PathDomainError(fmt::format("local_cost: y = {} not in [0, 1]", y));
  if (!(alpha > 0.0)) throw PathDomainError("local_cost: alpha must be positive");
  const double T = alpha * t;
  if (!(x >= 0.0 && x <= T))
    throw PathDomainError(fmt::format("local_cost: x = {} outside [0, alpha t = {}]", x, T));
  return cost_unchecked(T, x, y);
}

PathFunction::PathFunction(std::vector<double> knots, std::vector<double> values)
    : knots_(std::move(knots)), values_(std::move(values)) {
  if (knots_.size() < 2 || knots_.size() != values_.size())
    throw PathDomainError("path: need at least two knots and one value per knot");
  if (knots_.front() != 0.0 || knots_.back() != 1.0)
    throw PathDomainError("path: knots must run from 0 to 1");
  if (values_.front() != 0.0) throw PathDomainError("path: phi(0) must be 0");
  for (std::size_t i = 1; i < knots_.size(); ++i) {
    if (!(knots_[i] > knots_[i - 1])) throw PathDomainError("path: knots must increase strictly");
    double& v = values_[i];
    if (v > knots_[i]) {
      if (v > knots_[i] + kClamp) throw PathDomainError(fmt::format("path: phi({}) > t", knots_[i]));
      v = knots_[i];
    }
  }
  slopes_.resize(knots_.size() - 1);
  for (std::size_t i = 0; i + 1 < knots_.size(); ++i) {
    double s = (values_[i + 1] - values_[i]) / (knots_[i + 1] - knots_[i]);
    if (s < -kClamp || s > 1.0 + kClamp || !std::isfinite(s))
      throw PathDomainError(fmt::format("path: slope {} on piece {} not in [0, 1]", s, i));
    slopes_[i] = std::clamp(s, 0.0, 1.0);
  }
}

PathFunction PathFunction::line(double slope) { return {{0.0, 1.0}, {0.0, slope}}; }

std::size_t PathFunction::piece_of(double t) const {
  if (t <= 0.0) return 0;
  if (t >= 1.0) return pieces() - 1;
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
  return static_cast<std::size_t>(it - knots_.begin()) - 1;
}

double PathFunction::operator()(double t) const {
  const std::size_t i = piece_of(t);
  return values_[i] + slopes_[i] * (t - knots_[i]);
}

double PathFunction::slope_at(double t) const { return slopes_[piece_of(t)]; }

PathFunction PathFunction::refined() const {
  std::vector<double> k;
  std::vector<double> v;
  k.reserve(2 * knots_.size());
  v.reserve(2 * knots_.size());
  for (std::size_t i = 0; i + 1 < knots_.size(); ++i) {
    k.push_back(knots_[i]);
    v.push_back(values_[i]);
    const double mid = 0.5 * (knots_[i] + knots_[i + 1]);
    k.push_back(mid);
    v.push_back(values_[i] + slopes_[i] * (mid - knots_[i]));
  }
  k.push_back(knots_.back());
  v.push_back(values_.back());
  return {std::move(k), std::move(v)};
}

double path_rate(const PathFunction& phi, double alpha) {
  if (!(alpha > 0.0)) throw PathDomainError("path_rate: alpha must be positive");
  const auto& k = phi.knots();
  const auto& v = phi.values();
  double total = 0.0;
  for (std::size_t i = 0; i < phi.pieces(); ++i) {
    const double a = k[i];
    const double b = k[i + 1];
    const double y = phi.slope(i);
    const double x0 = v[i];
    const double x1 = v[i + 1];
    // Positive-measure divergence: stuck at 0, or riding the line x = alpha t.
    if (x1 <= 0.0 && y < 1.0) return kInf;
    if (y > 0.0 && x0 >= alpha * a && x1 >= alpha * b) return kInf;
    if (x0 > alpha * a * (1.0 + kClamp) || x1 > alpha * b * (1.0 + kClamp)) return kInf;
    if (a == 0.0 && x0 == 0.0) {
      // phi = y t: the integrand L(alpha t, y t, y) does not depend on t.
      total += (b - a) * cost_unchecked(alpha, y, y);
      continue;
    }
    auto f = [&](double t) {
      const double x = x0 + y * (t - a);
      return cost_unchecked(alpha * t, std::clamp(x, 0.0, alpha * t), y);
    };
    double err = 0.0;
    const double piece = integrator().integrate(f, a, b, 1e-14, &err);
    if (!std::isfinite(piece)) return kInf;
    total += piece;
  }
  return total;
}

double EulerSolution::chord_deviation() const {
  double dev = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) dev = std::max(dev, std::abs(phi[i] - x_target * t[i]));
  return dev;
}

namespace {

namespace odeint = boost::numeric::odeint;
using State = std::array<double, 3>;  // phi, phi', accumulated cost

struct Node {
  double t;
  double phi;
  double v;
  double a;  // phi''
};

struct Shot {
  bool ok = false;
  double phi1 = 0.0;
  double cost = 0.0;
  std::size_t steps = 0;
  std::vector<Node> nodes;
  std::string failure;
};

class EulerSystem {
 public:
  EulerSystem(double alpha, const EulerOptions& opt)
      : alpha_(alpha),
        opt_(opt),
        mean_(alpha / (alpha + 1.0)),
        mu_(0.5 * (1.0 + std::sqrt(1.0 + 4.0 * (alpha + 1.0) / (alpha * alpha)))) {}

  double mean() const { return mean_; }
  double mu() const { return mu_; }

  void operator()(const State& s, State& ds, double t) const {
    const double phi = s[0];
    const double v = s[1];
    ds[0] = v;
    ds[1] = accel(t, phi, v);
    ds[2] = cost_unchecked(alpha_ * t, phi, v);
  }

  double accel(double t, double phi, double v) const {
    return v * (1.0 - v) * (alpha_ / (alpha_ * t - phi) - 1.0 / phi);
  }

  bool interior(double t, const State& s) const {
    const double phi = s[0];
    const double v = s[1];
    return std::isfinite(phi) && std::isfinite(v) && std::isfinite(s[2]) && phi > kClamp * t &&
           phi < alpha_ * t * (1.0 - kClamp) && v > 0.0 && v < 1.0;
  }

  // phi on [0, eps] along c* t + (c - c*) eps (t / eps)^mu / mu.
  double phi_start(double t, double d) const {
    const double e = opt_.eps;
    return mean_ * t + d * e * std::pow(t / e, mu_) / mu_;
  }
  double v_start(double t, double d) const {
    return mean_ + d * std::pow(t / opt_.eps, mu_ - 1.0);
  }

  // d = c - c*, the departure of the initial slope from the mean.
  Shot shoot(double d, bool record) const {
    Shot shot;
    const double e = opt_.eps;
    const double phi0 = phi_start(e, d);
    const double psi = phi0 / e;
    State s{phi0, mean_ + d, e * cost_unchecked(alpha_, psi, psi)};
    double t = e;
    if (!interior(t, s)) {
      shot.failure = "initial point outside the interior";
      return shot;
    }
    auto stepper = odeint::make_controlled(opt_.atol, opt_.rtol, odeint::runge_kutta_dopri5<State>());
    double dt = 1e-3 * e;
    if (record) shot.nodes.push_back({t, s[0], s[1], accel(t, s[0], s[1])});
    constexpr std::size_t kMaxSteps = 200000;
    while (t < 1.0) {
      if (shot.steps > kMaxSteps) {
        shot.failure = "step budget exhausted";
        return shot;
      }
      dt = std::min(dt, 1.0 - t);
      const State prev = s;
      const double t_prev = t;
      const auto res = stepper.try_step(*this, s, t, dt);
      if (res == odeint::fail) {
        if (dt < 1e-15 * t) {
          shot.failure = fmt::format("step size collapsed at t = {}", t);
          return shot;
        }
        continue;
      }
      if (!interior(t, s)) {
        // Reject and halve: the cost is infinite outside, so the optimum stays inside.
        s = prev;
        dt = 0.5 * (t - t_prev);
        t = t_prev;
        stepper.reset();
        if (dt < 1e-15 * t) {
          shot.failure = fmt::format("step size collapsed near the boundary at t = {}", t);
          return shot;
        }
        continue;
      }
      ++shot.steps;
      if (1.0 - t < 1e-14) t = 1.0;
      if (record) shot.nodes.push_back({t, s[0], s[1], accel(t, s[0], s[1])});
    }
    shot.ok = true;
    shot.phi1 = s[0];
    shot.cost = s[2];
    return shot;
  }

 private:
  double alpha_;
  EulerOptions opt_;
  double mean_;
  double mu_;
};

// Cubic Hermite interpolation of (phi, phi') between accepted steps.
void sample(const EulerSystem& sys, const Shot& shot, double d, double eps, std::size_t n,
            EulerSolution& out) {
  out.t.resize(n);
  out.phi.resize(n);
  out.phidot.resize(n);
  std::size_t j = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = i + 1 == n ? 1.0 : static_cast<double>(i) / static_cast<double>(n - 1);
    out.t[i] = t;
    if (t < eps) {
      out.phi[i] = t == 0.0 ? 0.0 : sys.phi_start(t, d);
      out.phidot[i] = sys.v_start(t, d);
      continue;
    }
    while (j + 2 < shot.nodes.size() && shot.nodes[j + 1].t < t) ++j;
    const Node& a = shot.nodes[j];
    const Node& b = shot.nodes[std::min(j + 1, shot.nodes.size() - 1)];
    const double h = b.t - a.t;
    if (h <= 0.0) {
      out.phi[i] = b.phi;
      out.phidot[i] = b.v;
      continue;
    }
    const double s = std::clamp((t - a.t) / h, 0.0, 1.0);
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
    const double h10 = s * (1 - s) * (1 - s);
    const double h01 = s * s * (3 - 2 * s);
    const double h11 = s * s * (s - 1);
    out.phi[i] = h00 * a.phi + h10 * h * a.v + h01 * b.phi + h11 * h * b.v;
    out.phidot[i] = h00 * a.v + h10 * h * a.a + h01 * b.v + h11 * h * b.a;
  }
  out.phi.back() = shot.phi1;
}

}  // namespace

EulerSolution euler_solve(double alpha, double x_target, const EulerOptions& opt) {
  if (!(alpha > 1.0)) throw std::invalid_argument("euler_solve: alpha must exceed 1");
  if (!(x_target > 0.0 && x_target < 1.0))
    throw std::invalid_argument("euler_solve: x_target must lie in (0, 1)");
  if (!(opt.eps > 0.0 && opt.eps < 1e-2) || opt.grid_points < 2 || opt.scan_points < 3)
    throw std::invalid_argument("euler_solve: invalid options");

  const EulerSystem sys(alpha, opt);
  const double mean = sys.mean();
  auto gap = [&](double d) {
    const Shot s = sys.shoot(d, false);
    return s.ok ? s.phi1 - x_target : std::numeric_limits<double>::quiet_NaN();
  };

  // Scan d = c - c* on a two-sided geometric grid: the terminal value is
  // sensitive to d on the scale eps^(mu - 1).
  const double room_lo = mean * (1.0 - 1e-9);
  const double room_hi = (1.0 - mean) * (1.0 - 1e-9);
  const std::size_t side = (opt.scan_points - 1) / 2;
  const double smallest = 1e-13;
  std::vector<double> ds;
  for (std::size_t i = 1; i <= side; ++i)
    ds.push_back(-room_lo * std::pow(smallest, static_cast<double>(i - 1) / static_cast<double>(side - 1)));
  ds.push_back(0.0);
  for (std::size_t i = 1; i <= side; ++i)
    ds.push_back(room_hi * std::pow(smallest, static_cast<double>(side - i) / static_cast<double>(side - 1)));

  std::vector<double> gs(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) gs[i] = gap(ds[i]);

  EulerSolution best;
  best.alpha = alpha;
  best.x_target = x_target;
  double prev_g = -kInf;
  for (double g : gs) {
    if (std::isnan(g)) continue;
    if (g < prev_g) best.monotone = false;
    prev_g = g;
  }

  struct Root {
    double d;
    Shot shot;
  };
  std::vector<Root> roots;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (gs[i] == 0.0) {
      roots.push_back({ds[i], sys.shoot(ds[i], true)});
      continue;
    }
    if (i + 1 == ds.size() || std::isnan(gs[i]) || std::isnan(gs[i + 1])) continue;
    if ((gs[i] < 0.0) == (gs[i + 1] < 0.0) || gs[i + 1] == 0.0) continue;
    double lo = ds[i];
    double hi = ds[i + 1];
    double glo = gs[i];
    // Bisection: robust where the terminal map is steep, and each halving is
    // exact in d.
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid == lo || mid == hi) break;
      const double gm = gap(mid);
      if (std::isnan(gm)) break;
      if (std::abs(gm) <= opt.tol) {
        lo = hi = mid;
        break;
      }
      if ((gm < 0.0) == (glo < 0.0)) {
        lo = mid;
        glo = gm;
      } else {
        hi = mid;
      }
    }
    const double d = 0.5 * (lo + hi);
    roots.push_back({d, sys.shoot(d, true)});
  }

  std::erase_if(roots, [](const Root& r) { return !r.shot.ok; });
  if (roots.empty())
    throw EulerError(fmt::format(
        "euler_solve: no initial slope in (0, 1) reaches phi(1) = {} for alpha = {}", x_target,
        alpha));

  const auto chosen = std::min_element(roots.begin(), roots.end(), [](const Root& a, const Root& b) {
    return a.shot.cost < b.shot.cost;
  });
  for (const auto& r : roots) best.roots.push_back(mean + r.d);
  std::sort(best.roots.begin(), best.roots.end());

  const Shot& shot = chosen->shot;
  best.shoot_param = mean + chosen->d;
  best.cost = shot.cost;
  best.steps = shot.steps;
  best.terminal_error = std::abs(shot.phi1 - x_target);
  sample(sys, shot, chosen->d, opt.eps, opt.grid_points, best);
  best.path = PathFunction(best.t, best.phi);
  best.polyline_cost = path_rate(best.path, alpha);
  return best;
}

}  // namespace leafldp
