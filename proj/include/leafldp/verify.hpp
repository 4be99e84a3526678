#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace leafldp {

/// Sample sizes for the Monte Carlo criteria. `quick` uses the full sizes
/// (n = 1e5, 200 / 1e4 replicates, 1e6 samples); `smoke` shrinks them by
/// roughly 10x-100x for fast plumbing checks. Tolerances never change.
enum class Budget { smoke, quick };

Budget parse_budget(std::string_view text);
std::string_view to_string(Budget budget);

struct VerifyOptions {
  Budget budget = Budget::quick;
  std::uint64_t seed = 20240607;
};

/// One measured quantity against its tolerance.
struct Check {
  std::string what;
  double measured;
  double tolerance;
  bool passed;
  std::string note;    // comparison shown in reports
  bool gating = true;  // false for diagnostics that do not decide the verdict

  /// "ok   <what> = <measured> (<note> <tolerance>)"
  std::string line() const;
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::vector<Check> checks;
  double seconds = 0.0;

  /// "[PASS] 3 LLN/CLT constants ..." style one-line summary.
  std::string line() const;
};

inline constexpr int kCriteria = 8;

/// Runs one acceptance criterion (1..kCriteria).
CriterionResult run_criterion(int id, const VerifyOptions& options);

/// Runs the listed criteria (all when empty), calling `report` after each.
std::vector<CriterionResult> run_acceptance(
    std::span<const int> ids, const VerifyOptions& options,
    const std::function<void(const CriterionResult&)>& report = {});

}  // namespace leafldp
