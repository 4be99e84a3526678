// Runs the acceptance criteria and prints one pass/fail line per criterion,
// followed by the individual measurements.

#include <iostream>
#include <vector>

#include <CLI11.hpp>

#include "leafldp/verify.hpp"

int main(int argc, char** argv) {
  CLI::App app("acceptance criteria", "acceptance");
  std::vector<int> ids;
  std::string budget = "quick";
  leafldp::VerifyOptions opt;
  app.add_option("--criterion", ids, "criterion id 1..8 (repeatable; default all)")
      ->check(CLI::Range(1, leafldp::kCriteria));
  app.add_option("--budget", budget, "smoke | quick")
      ->check(CLI::IsMember({"smoke", "quick"}))
      ->capture_default_str();
  app.add_option("--seed", opt.seed, "base seed")->capture_default_str();
  bool details = true;
  app.add_flag("!--no-details", details, "print only the summary lines");
  CLI11_PARSE(app, argc, argv);
  opt.budget = leafldp::parse_budget(budget);

  const auto results = leafldp::run_acceptance(ids, opt, [&](const leafldp::CriterionResult& r) {
    std::cout << r.line() << '\n';
    if (details)
      for (const auto& c : r.checks) std::cout << "    " << c.line() << '\n';
    std::cout.flush();
  });
  bool all = true;
  for (const auto& r : results) all = all && r.passed;
  return all ? 0 : 1;
}
