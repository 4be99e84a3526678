#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace leafldp::cli {

/// Exit statuses of run().
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;  // verification failure or numerical error
inline constexpr int kExitConfig = 2;  // bad flags, config file, grid or model

/// Parses "start:stop:step" (or a single number) into an increasing grid.
/// Points are start + i step up to stop, with stop included when it lies on
/// the grid to within 1e-9 step. Throws std::invalid_argument.
std::vector<double> parse_grid(std::string_view text);

enum class Format { csv, json };

/// Fully resolved settings of one run; echoed into every output header.
struct RunConfig {
  std::string command;
  std::optional<std::string> model;
  std::optional<double> alpha;
  std::int64_t k0 = 1;
  std::int64_t n = 100;
  std::vector<std::int64_t> sweep_n;
  std::int64_t reps = 100;
  std::uint64_t seed = 20240607;
  std::string out;  // empty: standard output
  Format format = Format::csv;
  bool timestamp = true;
  std::string lambda_grid;
  std::string x_grid;
  std::vector<double> xs;
  std::string method = "auto";  // auto | quadrature
  double quad_tol = 1e-13;
  std::string object = "chain";
  std::string suite = "all";
  std::string budget = "quick";
};

/// Runs the command line; writes results to `out` (or --out files) and
/// diagnostics to `err`. Returns one of the exit statuses above.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace leafldp::cli
