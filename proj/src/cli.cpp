#include "leafldp/cli.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <variant>

#include <CLI11.hpp>
#include <fmt/chrono.h>
#include <fmt/format.h>
#include <json.hpp>

#include "leafldp/chain.hpp"
#include "leafldp/kernels.hpp"
#include "leafldp/model.hpp"
#include "leafldp/path.hpp"
#include "leafldp/pmf.hpp"
#include "leafldp/pressure.hpp"
#include "leafldp/stats.hpp"
#include "leafldp/trees.hpp"
#include "leafldp/verify.hpp"

namespace leafldp::cli {

namespace {

/// Bad user input; maps to kExitConfig.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

double parse_number(std::string_view field, std::string_view text) {
  const std::string s(text);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty() || !std::isfinite(v))
    throw std::invalid_argument(fmt::format("grid {}: '{}' is not a finite number", field, text));
  return v;
}

}  // namespace

std::vector<double> parse_grid(std::string_view text) {
  const auto first = text.find(':');
  if (first == std::string_view::npos) return {parse_number("value", text)};
  const auto second = text.find(':', first + 1);
  if (second == std::string_view::npos || text.find(':', second + 1) != std::string_view::npos)
    throw std::invalid_argument(fmt::format("grid '{}' must look like start:stop:step", text));
  const double start = parse_number("start", text.substr(0, first));
  const double stop = parse_number("stop", text.substr(first + 1, second - first - 1));
  const double step = parse_number("step", text.substr(second + 1));
  if (!(step > 0.0)) throw std::invalid_argument(fmt::format("grid '{}': step must be positive", text));
  if (stop < start) throw std::invalid_argument(fmt::format("grid '{}': stop is below start", text));
  const double count = std::floor((stop - start) / step + 1e-9);
  if (count > 1e7) throw std::invalid_argument(fmt::format("grid '{}' has too many points", text));
  std::vector<double> grid;
  for (std::int64_t i = 0; i <= static_cast<std::int64_t>(count); ++i) {
    double v = start + static_cast<double>(i) * step;
    if (std::abs(v) < 1e-12 * step) v = 0.0;  // keep an exact zero on symmetric grids
    grid.push_back(v);
  }
  return grid;
}

namespace {

using Cell = std::variant<std::int64_t, double, std::string>;

struct Table {
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void note(std::string key, std::string value) { meta.emplace_back(std::move(key), std::move(value)); }
};

std::string format_double(double v) { return fmt::format("{:.17g}", v); }

std::string cell_text(const Cell& c) {
  if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
  return std::get<std::string>(c);
}

std::string timestamp() {
  return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}",
                     std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now()));
}

void write_table(const Table& t, const RunConfig& cfg, std::ostream& os) {
  if (cfg.format == Format::csv) {
    if (cfg.timestamp) os << "# timestamp=" << timestamp() << '\n';
    for (const auto& [k, v] : t.meta) os << "# " << k << '=' << v << '\n';
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
    os << '\n';
    for (const auto& row : t.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << cell_text(row[i]);
      os << '\n';
    }
    return;
  }
  nlohmann::ordered_json j;
  if (cfg.timestamp) j["timestamp"] = timestamp();
  auto& meta = j["meta"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : t.meta) meta[k] = v;
  j["columns"] = t.columns;
  auto& rows = j["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : t.rows) {
    auto r = nlohmann::ordered_json::array();
    for (const auto& c : row) {
      if (const auto* i = std::get_if<std::int64_t>(&c)) r.push_back(*i);
      else if (const auto* d = std::get_if<double>(&c)) {
        if (std::isfinite(*d)) r.push_back(*d);
        else r.push_back(format_double(*d));  // JSON has no inf / nan
      } else r.push_back(std::get<std::string>(c));
    }
    rows.push_back(std::move(r));
  }
  os << j.dump(2) << '\n';
}

void emit(const Table& t, const RunConfig& cfg, std::ostream& out) {
  if (cfg.out.empty()) {
    write_table(t, cfg, out);
    return;
  }
  std::ofstream file(cfg.out, std::ios::binary);
  if (!file) throw ConfigError(fmt::format("--out: cannot open '{}' for writing", cfg.out));
  write_table(t, cfg, file);
  if (!file) throw std::runtime_error(fmt::format("writing '{}' failed", cfg.out));
}

void echo_config(Table& t, const RunConfig& cfg) {
  t.note("command", cfg.command);
  t.note("seed", std::to_string(cfg.seed));
  t.note("kernel", std::string(kernels::to_string(kernels::active().isa)));
}

void echo_model(Table& t, const ModelSpec& m) {
  t.note("model", m.name);
  t.note("resolved", m.describe());
  t.note("alpha", format_double(m.alpha()));
  t.note("k0", std::to_string(m.k0));
  t.note("s_n", std::string(to_string(m.slopes.kind())));
}

ModelSpec resolve_model(const RunConfig& cfg) {
  try {
    if (cfg.model) {
      auto m = parse_model(*cfg.model);
      if (cfg.alpha && std::abs(*cfg.alpha - m.alpha()) > 1e-12 * std::max(1.0, m.alpha()))
        throw ConfigError(fmt::format("--alpha {} contradicts --model {} (alpha {})", *cfg.alpha,
                                      *cfg.model, m.alpha()));
      return m;
    }
    if (cfg.alpha) {
      auto m = ModelSpec::linear(Param(*cfg.alpha), cfg.k0);
      m.name = fmt::format("linear:alpha={},k0={}", *cfg.alpha, cfg.k0);
      return m;
    }
  } catch (const ModelError& e) {
    throw ConfigError(fmt::format("--model: {}", e.what()));
  }
  throw ConfigError(fmt::format("{}: give --model or --alpha", cfg.command));
}

double resolve_alpha(const RunConfig& cfg) {
  if (cfg.alpha) {
    if (!(*cfg.alpha > 0.0) || !std::isfinite(*cfg.alpha))
      throw ConfigError("--alpha must be a positive finite number");
    if (cfg.model) resolve_model(cfg);  // consistency check only
    return *cfg.alpha;
  }
  if (cfg.model) return resolve_model(cfg).alpha();
  throw ConfigError(fmt::format("{}: give --alpha or --model", cfg.command));
}

PressureEval make_evaluator(const RunConfig& cfg, double alpha) {
  if (cfg.method == "quadrature") return PressureEval::quadrature(alpha, cfg.quad_tol);
  return PressureEval(alpha, cfg.quad_tol);
}

std::vector<double> grid_or(const std::string& text, std::string_view field, std::string_view fallback) {
  try {
    return parse_grid(text.empty() ? fallback : std::string_view(text));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(fmt::format("{}: {}", field, e.what()));
  }
}

std::vector<double> x_values(const RunConfig& cfg, std::string_view fallback) {
  std::vector<double> xs = cfg.xs;
  if (!cfg.x_grid.empty() || xs.empty()) {
    const auto g = grid_or(cfg.x_grid, "--x-grid", fallback);
    xs.insert(xs.end(), g.begin(), g.end());
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  return xs;
}

void echo_pressure(Table& t, const PressureEval& ev) {
  t.note("alpha", format_double(ev.alpha()));
  t.note("method", std::string(to_string(ev.method())));
  t.note("quad_tol", format_double(ev.quad_tol()));
  if (ev.extrapolated()) t.note("extrapolated", "true");
}

int cmd_pressure(const RunConfig& cfg, std::ostream& out) {
  const double alpha = resolve_alpha(cfg);
  const auto ev = make_evaluator(cfg, alpha);
  const auto grid = grid_or(cfg.lambda_grid, "--lambda-grid", "-5:5:0.1");
  Table t;
  echo_config(t, cfg);
  echo_pressure(t, ev);
  t.note("lambda_grid", cfg.lambda_grid.empty() ? "-5:5:0.1" : cfg.lambda_grid);
  t.columns = {"lambda", "Lambda", "dLambda", "d2Lambda", "ode_residual"};
  t.rows.resize(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) {
    const double l = grid[i];
    const auto d = pressure_derivatives(ev, l);
    t.rows[i] = {l, pressure(ev, l), d.first, d.second, ode_residual(ev, l)};
  });
  emit(t, cfg, out);
  return kExitOk;
}

int cmd_rate(const RunConfig& cfg, std::ostream& out) {
  const double alpha = resolve_alpha(cfg);
  const auto ev = make_evaluator(cfg, alpha);
  const auto xs = x_values(cfg, "0.05:1:0.05");
  for (double x : xs)
    if (!(x > 0.0 && x <= 1.0)) throw ConfigError(fmt::format("--x {} is outside (0, 1]", x));
  Table t;
  echo_config(t, cfg);
  echo_pressure(t, ev);
  t.columns = {"x", "lambda_star", "rate"};
  t.rows.resize(xs.size());
  std::vector<char> bracket(xs.size(), 0);
  parallel_for(xs.size(), [&](std::size_t i) {
    try {
      const auto p = rate(ev, xs[i]);
      t.rows[i] = {xs[i], p.lambda_star, p.rate};
    } catch (const RateBracketError&) {
      bracket[i] = 1;
      t.rows[i] = {xs[i], std::nan(""), std::nan("")};
    }
  });
  if (std::count(bracket.begin(), bracket.end(), 1))
    t.note("nan_rows", fmt::format("|lambda*| beyond {}", kRateBracketCap));
  emit(t, cfg, out);
  return kExitOk;
}

int cmd_path(const RunConfig& cfg, std::ostream& out) {
  const double alpha = resolve_alpha(cfg);
  if (!(alpha > 1.0)) throw ConfigError("path: the optimal path needs alpha > 1");
  const auto xs = x_values(cfg, "0.13");
  for (double x : xs)
    if (!(x > 0.0 && x < 1.0)) throw ConfigError(fmt::format("--x {} is outside (0, 1)", x));
  std::vector<EulerSolution> sols(xs.size());
  parallel_for(xs.size(), [&](std::size_t i) { sols[i] = euler_solve(alpha, xs[i]); });

  const PressureEval ev(alpha);
  Table t;
  echo_config(t, cfg);
  t.note("alpha", format_double(alpha));
  t.columns = {"x_target", "t", "phi", "phidot", "lln_line", "chord"};
  const double lln = lln_mean(alpha);
  for (const auto& s : sols) {
    double legendre = std::nan("");
    try {
      legendre = rate(ev, s.x_target).rate;
    } catch (const RateBracketError&) {
    }
    t.note(fmt::format("x={}", s.x_target),
           fmt::format("cost {} legendre {} shoot_slope {} roots {} chord_deviation {}",
                       format_double(s.cost), format_double(legendre), format_double(s.shoot_param),
                       s.roots.size(), format_double(s.chord_deviation())));
    for (std::size_t i = 0; i < s.t.size(); ++i)
      t.rows.push_back({s.x_target, s.t[i], s.phi[i], s.phidot[i], lln * s.t[i], s.x_target * s.t[i]});
  }
  emit(t, cfg, out);
  return kExitOk;
}

int cmd_pmf(const RunConfig& cfg, std::ostream& out) {
  const auto model = resolve_model(cfg);
  Table t;
  echo_config(t, cfg);
  echo_model(t, model);

  if (!cfg.lambda_grid.empty()) {
    auto ns = cfg.sweep_n.empty() ? std::vector<std::int64_t>{cfg.n} : cfg.sweep_n;
    std::sort(ns.begin(), ns.end());
    ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
    if (ns.front() < 1) throw ConfigError("--n values must be >= 1");
    const auto lambdas = grid_or(cfg.lambda_grid, "--lambda-grid", "");
    const PressureEval ev(model.alpha());
    t.note("lambda_grid", cfg.lambda_grid);
    t.note("pressure_method", std::string(to_string(ev.method())));
    t.columns = {"n", "lambda", "per_n", "ratio", "logderiv", "Lambda", "dLambda"};
    for (const auto& row : estimator_sweep(model, ns, lambdas)) {
      const auto d = pressure_derivatives(ev, row.lambda);
      t.rows.push_back({row.n, row.lambda, row.estimates.per_n, row.estimates.ratio,
                        row.estimates.logderiv, pressure(ev, row.lambda), d.first});
    }
    emit(t, cfg, out);
    return kExitOk;
  }

  if (cfg.n < 1) throw ConfigError("--n must be >= 1");
  const Pmf p = pmf_at(model, cfg.n);
  t.note("n", std::to_string(cfg.n));
  if (!cfg.x_grid.empty() || !cfg.xs.empty()) {
    const auto xs = x_values(cfg, "");
    const PressureEval ev(model.alpha());
    t.columns = {"n", "x", "tail_rate", "rate"};
    for (double x : xs) {
      if (!(x > 0.0 && x <= 1.0)) throw ConfigError(fmt::format("--x {} is outside (0, 1]", x));
      double r = std::nan("");
      try {
        r = rate(ev, x).rate;
      } catch (const RateBracketError&) {
      }
      t.rows.push_back({cfg.n, x, tail_log_prob(p, x), r});
    }
    emit(t, cfg, out);
    return kExitOk;
  }

  t.columns = {"k", "probability", "log_probability"};
  for (std::int64_t k = p.k_min(); k <= p.k_max(); ++k)
    t.rows.push_back({k, std::exp(p.log_prob(k)), p.log_prob(k)});
  emit(t, cfg, out);
  return kExitOk;
}

int cmd_simulate(const RunConfig& cfg, std::ostream& out) {
  if (cfg.n < 1 || cfg.reps < 1) throw ConfigError("--n and --reps must be >= 1");
  const auto reps = static_cast<std::size_t>(cfg.reps);
  std::vector<GrowthResult> results(reps);
  Table t;
  echo_config(t, cfg);
  t.note("object", cfg.object);
  t.note("n", std::to_string(cfg.n));
  t.note("reps", std::to_string(cfg.reps));
  double alpha = 0.0;

  if (cfg.object == "chain" || cfg.object == "pa_graph") {
    const auto model = resolve_model(cfg);
    echo_model(t, model);
    alpha = model.alpha();
    if (cfg.object == "chain") {
      parallel_for(reps, [&](std::size_t r) {
        results[r] = {"chain", cfg.n, simulate_final(model, cfg.n, cfg.seed, r), cfg.seed, r};
      });
    } else {
      const auto kind = model.slopes.kind();
      if (kind != SlopeKind::pref_attach && kind != SlopeKind::randomized_pa)
        throw ConfigError("--object pa_graph needs a pa or rpa model");
      if (model.slopes.seed_degree() != 2 || model.slopes.seed_vertices() != 2)
        throw ConfigError("--object pa_graph supports only the single-edge seed (dg=2, vg=2)");
      parallel_for(reps, [&](std::size_t r) { results[r] = grow_pa_graph(model, cfg.n, cfg.seed, r); });
    }
  } else if (cfg.object == "yule") {
    alpha = 0.5;
    parallel_for(reps, [&](std::size_t r) { results[r] = grow_yule(cfg.n, cfg.seed, r); });
  } else if (cfg.object == "uniform_tree" || cfg.object == "plane_tree") {
    const bool plane = cfg.object == "plane_tree";
    alpha = plane ? 2.0 : 1.0;
    const auto kind = plane ? RecursiveKind::plane_oriented : RecursiveKind::uniform;
    parallel_for(reps, [&](std::size_t r) { results[r] = grow_recursive(kind, cfg.n, cfg.seed, r); });
  } else if (cfg.object == "stirling") {
    alpha = 2.0;
    parallel_for(reps, [&](std::size_t r) { results[r] = grow_stirling(cfg.n, cfg.seed, r); });
  } else {
    throw ConfigError(fmt::format(
        "--object '{}' (chain|pa_graph|yule|uniform_tree|plane_tree|stirling)", cfg.object));
  }

  const auto summary = summarize_growth(results, alpha);
  t.note("statistic", results.front().model);
  t.note("mean_over_n", format_double(summary.empirical_mean));
  t.note("mean_std_error", format_double(summary.mean_std_error));
  t.note("target_mean", format_double(summary.target_mean));
  t.note("scaled_variance", format_double(summary.empirical_var));
  t.note("target_variance", format_double(summary.target_var));
  t.columns = {"replicate", "step", "statistic"};
  for (const auto& r : results)
    t.rows.push_back({static_cast<std::int64_t>(r.replicate), r.n, r.statistic});
  emit(t, cfg, out);
  return kExitOk;
}

std::vector<int> parse_suite(const std::string& suite) {
  if (suite == "all") return {};
  std::vector<int> ids;
  std::stringstream ss(suite);
  std::string item;
  while (std::getline(ss, item, ',')) {
    int id = 0;
    try {
      std::size_t used = 0;
      id = std::stoi(item, &used);
      if (used != item.size()) id = 0;
    } catch (const std::exception&) {
    }
    if (id < 1 || id > kCriteria)
      throw ConfigError(fmt::format("--suite: '{}' is not 'all' or a list of 1..{}", item, kCriteria));
    ids.push_back(id);
  }
  if (ids.empty()) throw ConfigError("--suite is empty");
  return ids;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out) {
  const auto ids = parse_suite(cfg.suite);
  VerifyOptions opt;
  try {
    opt.budget = parse_budget(cfg.budget);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(fmt::format("--budget: {}", e.what()));
  }
  opt.seed = cfg.seed;

  Table t;
  echo_config(t, cfg);
  t.note("budget", cfg.budget);
  t.columns = {"criterion", "name", "check", "measured", "tolerance", "comparison", "passed", "gating"};
  bool all = true;
  const auto results = run_acceptance(ids, opt, [&](const CriterionResult& r) {
    out << r.line() << '\n';
    for (const auto& c : r.checks) out << "    " << c.line() << '\n';
    out.flush();
  });
  for (const auto& r : results) {
    all = all && r.passed;
    for (const auto& c : r.checks)
      t.rows.push_back({static_cast<std::int64_t>(r.id), r.name, c.what, c.measured, c.tolerance, c.note,
                        std::string(c.passed ? "true" : "false"), std::string(c.gating ? "true" : "false")});
  }
  std::size_t passed = 0;
  for (const auto& r : results) passed += r.passed;
  out << fmt::format("{}/{} criteria passed\n", passed, results.size());
  if (!cfg.out.empty()) emit(t, cfg, out);
  return all ? kExitOk : kExitFailed;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app("Leaf-count chains of random trees: pressure, rates, optimal paths, exact laws and simulation",
               "leafldp");
  app.fallthrough();
  app.require_subcommand(1, 1);
  app.set_config("--config", "", "TOML/INI file of flag values; command-line flags take precedence");

  std::string format = "csv";
  std::optional<double> alpha;
  std::optional<std::string> model;
  bool no_timestamp = false;
  app.add_option("--model", model, "pa:beta=0 | rpa:beta=..,gamma=1:0.5+2:0.5,seed=.. | yule | ...");
  app.add_option("--alpha", alpha, "limit slope alpha of s_n");
  app.add_option("--k0", cfg.k0, "initial leaf count for --alpha without --model")->capture_default_str();
  app.add_option("--n", cfg.n, "chain step")->capture_default_str();
  app.add_option("--sweep-n", cfg.sweep_n, "steps for the pmf estimator sweep (repeatable)");
  app.add_option("--reps", cfg.reps, "replicates")->capture_default_str();
  app.add_option("--seed", cfg.seed, "base seed; replicate r uses stream r")->capture_default_str();
  app.add_option("--out", cfg.out, "output file (default: standard output)");
  app.add_option("--format", format, "csv | json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  app.add_flag("--no-header-timestamp", no_timestamp, "omit the timestamp line");
  app.add_option("--lambda-grid", cfg.lambda_grid, "start:stop:step");
  app.add_option("--x-grid", cfg.x_grid, "start:stop:step");
  app.add_option("--x", cfg.xs, "target value (repeatable)");
  app.add_option("--method", cfg.method, "auto | quadrature")
      ->check(CLI::IsMember({"auto", "quadrature"}))
      ->capture_default_str();
  app.add_option("--quad-tol", cfg.quad_tol, "quadrature tolerance")->capture_default_str();
  app.add_option("--object", cfg.object, "simulate: chain | pa_graph | yule | uniform_tree | plane_tree | stirling")
      ->capture_default_str();
  app.add_option("--suite", cfg.suite, "verify: all or a comma list of criteria")->capture_default_str();
  app.add_option("--budget", cfg.budget, "verify: smoke | quick")->capture_default_str();

  app.add_subcommand("pressure", "Lambda, its derivatives and the ODE residual on a lambda grid");
  app.add_subcommand("rate", "rate function I(x) by Legendre transform");
  app.add_subcommand("path", "optimal paths of the contracted rate (alpha > 1)");
  app.add_subcommand("pmf", "exact law of Z_n, tail rates, or MGF estimator sweep");
  app.add_subcommand("simulate", "Monte Carlo replicates of the chain or a combinatorial object");
  app.add_subcommand("verify", "acceptance suite with measured values against tolerances");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o;
    std::ostringstream e2;
    const int code = app.exit(e, o, e2);
    out << o.str();
    err << e2.str();
    return code == 0 ? kExitOk : kExitConfig;
  }

  cfg.command = app.get_subcommands().front()->get_name();
  cfg.model = model;
  cfg.alpha = alpha;
  cfg.format = format == "json" ? Format::json : Format::csv;
  cfg.timestamp = !no_timestamp;

  try {
    if (cfg.command == "pressure") return cmd_pressure(cfg, out);
    if (cfg.command == "rate") return cmd_rate(cfg, out);
    if (cfg.command == "path") return cmd_path(cfg, out);
    if (cfg.command == "pmf") return cmd_pmf(cfg, out);
    if (cfg.command == "simulate") return cmd_simulate(cfg, out);
    return cmd_verify(cfg, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ModelError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailed;
  }
}

}  // namespace leafldp::cli
