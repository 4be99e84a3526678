#include "leafldp/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <fmt/format.h>

#include "leafldp/chain.hpp"
#include "leafldp/exact_poly.hpp"
#include "leafldp/path.hpp"
#include "leafldp/pmf.hpp"
#include "leafldp/pressure.hpp"
#include "leafldp/stats.hpp"
#include "leafldp/trees.hpp"

namespace leafldp {

Budget parse_budget(std::string_view text) {
  if (text == "smoke") return Budget::smoke;
  if (text == "quick") return Budget::quick;
  throw std::invalid_argument(fmt::format("unknown budget '{}' (smoke|quick)", text));
}

std::string_view to_string(Budget budget) { return budget == Budget::smoke ? "smoke" : "quick"; }

std::string Check::line() const {
  return fmt::format("{} {} = {:.6g} ({} {:.3g})", passed ? "ok  " : "FAIL", what, measured, note,
                     tolerance);
}

std::string CriterionResult::line() const {
  std::size_t gating = 0;
  std::size_t ok = 0;
  const Check* shown = nullptr;
  for (const auto& c : checks) {
    if (!c.gating) continue;
    ++gating;
    ok += c.passed;
    if (!c.passed && !shown) shown = &c;
  }
  if (!shown && !checks.empty()) shown = &checks.front();
  std::string out = fmt::format("[{}] {} {}: {}/{} checks", passed ? "PASS" : "FAIL", id, name, ok,
                                gating);
  if (shown)
    out += fmt::format("; {} = {:.6g} ({} {:.3g})", shown->what, shown->measured,
                       shown->note.empty() ? "tol" : shown->note, shown->tolerance);
  out += fmt::format(" [{:.1f}s]", seconds);
  return out;
}

namespace {

Check at_most(std::string what, double measured, double tol) {
  return {std::move(what), measured, tol, measured <= tol, "tol", true};
}

Check at_least(std::string what, double measured, double bound) {
  return {std::move(what), measured, bound, measured > bound, "must exceed", true};
}

std::vector<double> lambda_grid() {
  std::vector<double> grid;
  for (int i = -50; i <= 50; ++i) {
    const double l = i / 10.0;
    if (std::abs(l) >= 1e-3) grid.push_back(l);
  }
  return grid;
}

void criterion_pressure(CriterionResult& r) {
  r.name = "pressure consistency";
  const auto grid = lambda_grid();
  for (double alpha : {0.5, 1.0, 2.0}) {
    const PressureEval closed(alpha);
    const auto quad = PressureEval::quadrature(alpha);
    double worst = 0.0;
    for (double l : grid) worst = std::max(worst, std::abs(pressure(quad, l) - pressure(closed, l)));
    r.checks.push_back(
        at_most(fmt::format("alpha={} max|quadrature - closed form|", alpha), worst, 1e-8));
  }
}

void criterion_ode(CriterionResult& r) {
  r.name = "ODE verification";
  const auto grid = lambda_grid();
  auto run = [&](const PressureEval& ev) {
    double worst = 0.0;
    for (double l : grid) worst = std::max(worst, std::abs(ode_residual(ev, l)));
    r.checks.push_back(at_most(
        fmt::format("alpha={} {} max|residual|", ev.alpha(), to_string(ev.method())), worst, 1e-6));
  };
  for (double alpha : {0.5, 1.0, 1.5, 2.0}) {
    const PressureEval ev(alpha);
    run(ev);
    if (ev.method() != PressureMethod::quadrature) run(PressureEval::quadrature(alpha));
  }
}

struct McSizes {
  std::int64_t mean_n;
  std::int64_t mean_reps;
  std::int64_t var_n;
  std::int64_t var_reps;
  std::int64_t tv_samples;
  std::int64_t bud_n;
  std::int64_t bud_reps;
};

McSizes sizes(Budget b) {
  if (b == Budget::smoke) return {10'000, 50, 10'000, 2'000, 200'000, 10'000, 50};
  return {100'000, 200, 100'000, 10'000, 1'000'000, 100'000, 200};
}

template <class Grow>
std::vector<GrowthResult> grow_many(std::int64_t reps, Grow grow) {
  std::vector<GrowthResult> out(static_cast<std::size_t>(reps));
  parallel_for(out.size(), [&](std::size_t r) { out[r] = grow(static_cast<std::uint64_t>(r)); });
  return out;
}

void criterion_lln_clt(CriterionResult& r, const VerifyOptions& opt) {
  r.name = "LLN/CLT constants";
  for (double alpha : {0.5, 1.0, 1.5, 2.0}) {
    std::vector<PressureEval> evs{PressureEval(alpha)};
    if (evs.front().method() != PressureMethod::quadrature) evs.push_back(PressureEval::quadrature(alpha));
    for (const auto& ev : evs) {
      const auto d = pressure_derivatives(ev, 0.0);
      const std::string tag = fmt::format("alpha={} {}", alpha, to_string(ev.method()));
      r.checks.push_back(at_most(tag + " |Lambda'(0) - alpha/(alpha+1)|",
                                 std::abs(d.first - alpha / (alpha + 1.0)), 0.0));
      r.checks.push_back(
          at_most(tag + " |Lambda''(0) - alpha^2/((1+alpha)^2(2+alpha))|",
                  std::abs(d.second - alpha * alpha / ((1 + alpha) * (1 + alpha) * (2 + alpha))),
                  0.0));
    }
  }

  const McSizes s = sizes(opt.budget);
  struct MeanCase {
    const char* label;
    double target;
    std::function<GrowthResult(std::uint64_t)> grow;
  };
  const std::int64_t n = s.mean_n;
  const std::uint64_t seed = opt.seed;
  const MeanCase cases[] = {
      {"plane-oriented leaves", 2.0 / 3.0,
       [&](std::uint64_t rep) { return grow_recursive(RecursiveKind::plane_oriented, n, seed, rep); }},
      {"uniform leaves", 0.5,
       [&](std::uint64_t rep) { return grow_recursive(RecursiveKind::uniform, n, seed + 1, rep); }},
      {"Yule cherries", 1.0 / 3.0,
       [&](std::uint64_t rep) { return grow_yule(n, seed + 2, rep); }},
  };
  for (const auto& c : cases) {
    const auto results = grow_many(s.mean_reps, c.grow);
    const auto rep = summarize_growth(results, 1.0);
    const double z = std::abs(rep.empirical_mean - c.target) / rep.mean_std_error;
    auto check = at_most(fmt::format("{} n={} reps={} |mean - {:.6g}| / SE (mean {:.6g})", c.label,
                                     n, s.mean_reps, c.target, rep.empirical_mean),
                         z, 3.0);
    check.note = "SE limit";
    r.checks.push_back(check);
  }

  for (const auto& model : {ModelSpec::plane_oriented(), ModelSpec::yule()}) {
    const auto rep = verify_clt(model, s.var_n, s.var_reps, seed + 3);
    const double rel = std::abs(rep.empirical_var - rep.target_var) / rep.target_var;
    auto check = at_most(fmt::format("{} chain n={} reps={} relative variance error (var {:.6g}, target {:.6g})",
                                     model.name, s.var_n, s.var_reps, rep.empirical_var,
                                     rep.target_var),
                         rel, 0.10);
    r.checks.push_back(check);
  }
}

void criterion_mgf(CriterionResult& r) {
  r.name = "MGF convergence";
  const auto model = ModelSpec::plane_oriented();
  const PressureEval ev(2.0);
  const std::int64_t ns[] = {1000, 4000};
  const double lambdas[] = {-1.0, 1.0};
  const auto rows = estimator_sweep(model, ns, lambdas);
  for (double l : lambdas) {
    double err1000 = 0.0;
    double err4000 = 0.0;
    for (const auto& row : rows) {
      if (row.lambda != l) continue;
      const double e = std::abs(row.estimates.ratio - pressure(ev, l));
      (row.n == 1000 ? err1000 : err4000) = e;
    }
    r.checks.push_back(at_most(fmt::format("lambda={} |ratio(4000) - Lambda|", l), err4000, 1e-3));
    Check shrink{fmt::format("lambda={} err(4000) - err(1000)", l), err4000 - err1000, 0.0,
                 err4000 < err1000, "must be below", true};
    r.checks.push_back(shrink);
  }
}

void criterion_ldp_tail(CriterionResult& r) {
  r.name = "LDP tail convergence";
  const auto model = ModelSpec::plane_oriented();
  const PressureEval ev(2.0);
  const std::int64_t ns[] = {500, 1000, 2000};
  const double xs[] = {0.85, 1.0};
  double dist[2][3] = {};
  Pmf p = Pmf::initial(model);
  std::vector<double> scratch;
  for (int j = 0; j < 3; ++j) {
    while (p.n < ns[j]) pmf_advance_inplace(p, model, scratch);
    for (int i = 0; i < 2; ++i) dist[i][j] = std::abs(tail_log_prob(p, xs[i]) - rate(ev, xs[i]).rate);
  }
  for (int i = 0; i < 2; ++i) {
    const bool decreasing = dist[i][1] < dist[i][0] && dist[i][2] < dist[i][1];
    r.checks.push_back({fmt::format("x={} distance to I(x) at n=500/1000/2000: {:.4g} {:.4g} {:.4g}; "
                                    "last step change",
                                    xs[i], dist[i][0], dist[i][1], dist[i][2]),
                        dist[i][2] - dist[i][1], 0.0, decreasing, "must be below", true});
  }
  r.checks.push_back(at_most("x=1 n=2000 |tail - log 2|", dist[1][2], 0.02));
}

void criterion_contraction(CriterionResult& r) {
  r.name = "contraction consistency";
  const PressureEval ev(2.0);
  for (double x : {0.13, 0.5, 2.0 / 3.0, 0.85}) {
    const auto sol = euler_solve(2.0, x);
    const double legendre = rate(ev, x).rate;
    r.checks.push_back(at_most(fmt::format("x={:.6g} |euler cost - Legendre rate| (cost {:.10g})", x,
                                           sol.cost, legendre),
                               std::abs(sol.cost - legendre), 1e-3));
    if (x == 0.13 || x == 0.85)
      r.checks.push_back(
          at_least(fmt::format("x={:.6g} max deviation from chord", x), sol.chord_deviation(), 1e-3));
  }
}

void criterion_real_rooted(CriterionResult& r) {
  r.name = "real-rootedness";
  const GammaPmf one_two({{1, 0.5}, {2, 0.5}});
  const ModelSpec presets[] = {
      ModelSpec::uniform_recursive(),
      ModelSpec::plane_oriented(),
      ModelSpec::yule(),
      ModelSpec::pref_attach(Rational{0, 1}),
      ModelSpec::pref_attach(Rational{1, 2}),
      ModelSpec::pref_attach(Rational{-1, 2}),
      ModelSpec::linear(Rational{3, 1}, 1),
      ModelSpec::randomized_pa(Rational{0, 1}, one_two, 7),
  };
  for (const auto& model : presets) {
    std::int64_t failures = 0;
    std::int64_t first_bad = 0;
    for (std::int64_t n = 1; n <= 30; ++n) {
      const auto cert = certify_model(model, n);
      if (!cert.passed && failures++ == 0) first_bad = n;
    }
    auto check = at_most(fmt::format("{} n=1..30 failed certifications{}", model.describe(),
                                     failures ? fmt::format(" (first at n={})", first_bad) : ""),
                         static_cast<double>(failures), 0.0);
    r.checks.push_back(check);
  }
}

void criterion_combinatorial(CriterionResult& r, const VerifyOptions& opt) {
  r.name = "combinatorial equivalence";
  const McSizes s = sizes(opt.budget);
  const std::size_t samples = static_cast<std::size_t>(s.tv_samples);
  std::uint64_t seed = opt.seed + 100;

  struct Case {
    const char* label;
    ModelSpec model;
    std::function<std::int64_t(std::int64_t n, std::uint64_t seed, std::uint64_t rep)> draw;
  };
  const Case cases[] = {
      {"Yule cherries", ModelSpec::yule(),
       [](std::int64_t n, std::uint64_t sd, std::uint64_t rep) { return grow_yule(n, sd, rep).statistic; }},
      {"uniform leaves", ModelSpec::uniform_recursive(),
       [](std::int64_t n, std::uint64_t sd, std::uint64_t rep) {
         return grow_recursive(RecursiveKind::uniform, n, sd, rep).statistic;
       }},
      {"plane-oriented leaves", ModelSpec::plane_oriented(),
       [](std::int64_t n, std::uint64_t sd, std::uint64_t rep) {
         return grow_recursive(RecursiveKind::plane_oriented, n, sd, rep).statistic;
       }},
      {"PA(beta=0) leaves", ModelSpec::pref_attach(Rational{0, 1}),
       [](std::int64_t n, std::uint64_t sd, std::uint64_t rep) {
         return grow_pa_graph(0.0, n, sd, rep).statistic;
       }},
      {"Stirling plateaux", ModelSpec::plane_oriented(),
       [](std::int64_t n, std::uint64_t sd, std::uint64_t rep) {
         return grow_stirling(n - 1, sd, rep).statistic;
       }},
  };
  for (const auto& c : cases) {
    for (std::int64_t n : {6, 12}) {
      std::vector<std::int64_t> values(samples);
      const std::uint64_t sd = seed++;
      parallel_for(samples, [&](std::size_t i) { values[i] = c.draw(n, sd, i); });
      const double tv = total_variation(values, pmf_at(c.model, n));
      r.checks.push_back(
          at_most(fmt::format("{} step n={} samples={} TV to chain pmf", c.label, n, samples), tv, 5e-3));
    }
  }

  // Quenched bud LLN on the multigraph, gamma uniform on {1, 2}, beta = 0.
  const GammaPmf one_two({{1, 0.5}, {2, 0.5}});
  const auto rpa = ModelSpec::randomized_pa(Rational{0, 1}, one_two, seed++);
  const double target = lln_mean(rpa.alpha());
  {
    const auto results = grow_many(
        s.bud_reps, [&](std::uint64_t rep) { return grow_pa_graph(rpa, s.bud_n, seed, rep); });
    const auto rep = summarize_growth(results, rpa.alpha());
    auto check = at_most(fmt::format("graph buds n={} reps={} |mean - {:.6g}| / SE (mean {:.6g})",
                                     s.bud_n, s.bud_reps, target, rep.empirical_mean),
                         std::abs(rep.empirical_mean - target) / rep.mean_std_error, 3.0);
    check.note = "SE limit";
    r.checks.push_back(check);
  }
  ++seed;
  // Diagnostics, not gating: the chain driven by the same environment, and
  // the graph's bud law against the chain at a small step.
  {
    std::vector<double> scaled(static_cast<std::size_t>(s.bud_reps));
    parallel_for(scaled.size(), [&](std::size_t i) {
      scaled[i] = static_cast<double>(simulate_final(rpa, s.bud_n, seed, i)) /
                  static_cast<double>(s.bud_n);
    });
    const auto m = summarize(scaled);
    // Under a fixed environment E[Z_n] / n differs from 3/4 by O(n^-1/2),
    // which is larger than the standard error here; compare with the exact
    // quenched mean and show the distance to 3/4 separately.
    const double exact = mean_sequence(rpa, s.bud_n).back() / static_cast<double>(s.bud_n);
    Check info{fmt::format("[info] chain with the same environment |mean - E[Z_n]/n| / SE (mean {:.6g}, "
                           "E[Z_n]/n {:.6g})",
                           m.mean, exact),
               std::abs(m.mean - exact) / m.std_error(), 3.0, false, "SE limit", false};
    info.passed = info.measured <= info.tolerance;
    r.checks.push_back(info);
    Check limit{fmt::format("[info] chain with the same environment |mean - {:.6g}| / SE", target),
                std::abs(m.mean - target) / m.std_error(), 3.0, false, "SE limit", false};
    limit.passed = limit.measured <= limit.tolerance;
    r.checks.push_back(limit);
  }
  ++seed;
  {
    const std::int64_t n = 8;
    std::vector<std::int64_t> values(samples);
    parallel_for(samples, [&](std::size_t i) { values[i] = grow_pa_graph(rpa, n, seed, i).statistic; });
    const double tv = total_variation(values, pmf_at(rpa, n));
    Check info{fmt::format("[info] graph buds vs chain pmf TV at step n={}", n), tv, 5e-3,
               tv <= 5e-3, "tol", false};
    r.checks.push_back(info);
  }
}

}  // namespace

CriterionResult run_criterion(int id, const VerifyOptions& options) {
  CriterionResult r;
  r.id = id;
  if (id < 1 || id > kCriteria)
    throw std::invalid_argument(fmt::format("no acceptance criterion {}", id));
  const auto start = std::chrono::steady_clock::now();
  try {
    switch (id) {
      case 1: criterion_pressure(r); break;
      case 2: criterion_ode(r); break;
      case 3: criterion_lln_clt(r, options); break;
      case 4: criterion_mgf(r); break;
      case 5: criterion_ldp_tail(r); break;
      case 6: criterion_contraction(r); break;
      case 7: criterion_real_rooted(r); break;
      case 8: criterion_combinatorial(r, options); break;
    }
  } catch (const std::exception& e) {
    r.checks.push_back({fmt::format("exception: {}", e.what()), 1.0, 0.0, false, "tol", true});
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  r.passed = !r.checks.empty() &&
             std::all_of(r.checks.begin(), r.checks.end(), [](const Check& c) { return !c.gating || c.passed; });
  return r;
}

std::vector<CriterionResult> run_acceptance(std::span<const int> ids, const VerifyOptions& options,
                                            const std::function<void(const CriterionResult&)>& report) {
  std::vector<int> which(ids.begin(), ids.end());
  if (which.empty())
    for (int i = 1; i <= kCriteria; ++i) which.push_back(i);
  std::vector<CriterionResult> out;
  for (int id : which) {
    out.push_back(run_criterion(id, options));
    if (report) report(out.back());
  }
  return out;
}

}  // namespace leafldp
