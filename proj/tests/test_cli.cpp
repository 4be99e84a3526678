#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "leafldp/cli.hpp"

using namespace leafldp;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::initializer_list<const char*> args) {
  std::vector<const char*> argv{"leafldp"};
  argv.insert(argv.end(), args.begin(), args.end());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("leafldp_test_" + name);
}

}  // namespace

TEST_CASE("grid syntax") {
  const auto g = cli::parse_grid("-5:5:0.1");
  CHECK(g.size() == 101);
  CHECK(g.front() == -5.0);
  CHECK(g.back() == doctest::Approx(5.0));
  CHECK(g[50] == 0.0);
  CHECK(cli::parse_grid("0.25") == std::vector<double>{0.25});
  CHECK(cli::parse_grid("0:1:0.3").size() == 4);
  CHECK_THROWS_AS(cli::parse_grid("1:0:0.1"), std::invalid_argument);
  CHECK_THROWS_AS(cli::parse_grid("0:1:0"), std::invalid_argument);
  CHECK_THROWS_AS(cli::parse_grid("0:1"), std::invalid_argument);
  CHECK_THROWS_AS(cli::parse_grid("a:1:0.1"), std::invalid_argument);
  CHECK_THROWS_AS(cli::parse_grid("0:inf:1"), std::invalid_argument);
}

TEST_CASE("pressure sweep") {
  const auto r = run({"pressure", "--alpha", "2", "--lambda-grid", "-5:5:0.1", "--no-header-timestamp"});
  REQUIRE(r.code == cli::kExitOk);
  const auto ls = lines(r.out);
  std::size_t header = 0;
  while (header < ls.size() && ls[header].starts_with("#")) ++header;
  REQUIRE(header < ls.size());
  CHECK(ls[header] == "lambda,Lambda,dLambda,d2Lambda,ode_residual");
  CHECK(ls.size() - header - 1 == 101);
  CHECK(r.out.find("# alpha=2\n") != std::string::npos);
  CHECK(r.out.find("# method=closed_form_two\n") != std::string::npos);
  CHECK(r.out.find("1,0.72039579686994548,") != std::string::npos);  // 17 significant digits
}

TEST_CASE("identical config gives identical bytes") {
  const auto a = run({"simulate", "--model", "plane_oriented", "--n", "2000", "--reps", "16", "--seed", "9",
                      "--no-header-timestamp"});
  const auto b = run({"simulate", "--model", "plane_oriented", "--n", "2000", "--reps", "16", "--seed", "9",
                      "--no-header-timestamp"});
  const auto c = run({"simulate", "--model", "plane_oriented", "--n", "2000", "--reps", "16", "--seed", "10",
                      "--no-header-timestamp"});
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out != c.out);
  const auto t = run({"simulate", "--model", "plane_oriented", "--n", "20", "--reps", "2"});
  CHECK(t.out.starts_with("# timestamp="));
}

TEST_CASE("outputs describe the model") {
  for (const char* model : {"yule", "pa:beta=1/2", "linear:alpha=3,k0=1", "rpa:beta=0,gamma=1:0.5+2:0.5,seed=4"}) {
    CAPTURE(model);
    const auto r = run({"pmf", "--model", model, "--n", "6", "--no-header-timestamp"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("# alpha=") != std::string::npos);
    CHECK(r.out.find("# k0=") != std::string::npos);
    CHECK(r.out.find("# s_n=") != std::string::npos);
    CHECK(r.out.find("k,probability,log_probability") != std::string::npos);
  }
}

TEST_CASE("path output") {
  const auto r = run({"path", "--alpha", "2", "--x", "0.13", "--x", "0.85", "--no-header-timestamp"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("# x=0.13=cost ") != std::string::npos);
  CHECK(r.out.find("# x=0.85=cost ") != std::string::npos);
  std::size_t rows = 0;
  for (const auto& l : lines(r.out))
    if (!l.empty() && l[0] != '#' && l[0] != 'x') ++rows;
  CHECK(rows == 2 * 1001);
}

TEST_CASE("pmf modes") {
  auto r = run({"pmf", "--model", "plane_oriented", "--sweep-n", "100", "--sweep-n", "50", "--lambda-grid",
                "-1:1:1", "--no-header-timestamp"});
  REQUIRE(r.code == 0);
  auto ls = lines(r.out);
  CHECK(ls.back().starts_with("100,1,"));
  r = run({"pmf", "--model", "plane_oriented", "--n", "500", "--x", "1", "--no-header-timestamp"});
  REQUIRE(r.code == 0);
  CHECK(lines(r.out).back().starts_with("500,1,0.68"));
}

TEST_CASE("rate output marks unreachable points") {
  const auto r = run({"rate", "--alpha", "2", "--x", "0.01", "--x", "1", "--no-header-timestamp"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("0.01,nan,nan") != std::string::npos);
  CHECK(r.out.find("1,inf,0.69314718055994529") != std::string::npos);
}

TEST_CASE("json output parses") {
  const auto r = run({"rate", "--alpha", "1.5", "--x-grid", "0.2:0.8:0.2", "--format", "json",
                      "--no-header-timestamp"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["meta"]["alpha"] == "1.5");
  CHECK(j["meta"]["method"] == "quadrature");
  CHECK(j["columns"].size() == 3);
  CHECK(j["rows"].size() == 4);
}

TEST_CASE("simulate objects") {
  for (const char* obj : {"chain", "yule", "uniform_tree", "plane_tree", "stirling"}) {
    CAPTURE(obj);
    const auto r = run({"simulate", "--object", obj, "--model", "plane_oriented", "--n", "50", "--reps", "5",
                        "--no-header-timestamp"});
    CHECK(r.code == 0);
  }
  const auto g = run({"simulate", "--object", "pa_graph", "--model", "pa:beta=0", "--n", "50", "--reps", "3"});
  CHECK(g.code == 0);
  const auto bad = run({"simulate", "--object", "pa_graph", "--model", "yule", "--n", "50"});
  CHECK(bad.code == cli::kExitConfig);
}

TEST_CASE("config file, with flags taking precedence") {
  const auto path = temp_file("config.toml");
  {
    std::ofstream f(path);
    f << "alpha = 2\nlambda-grid = \"-1:1:1\"\nno-header-timestamp = true\n";
  }
  const auto from_file = run({"pressure", "--config", path.c_str()});
  REQUIRE(from_file.code == 0);
  CHECK(from_file.out.find("# alpha=2\n") != std::string::npos);
  CHECK(from_file.out.find("# lambda_grid=-1:1:1\n") != std::string::npos);
  const auto overridden = run({"pressure", "--config", path.c_str(), "--alpha", "1"});
  REQUIRE(overridden.code == 0);
  CHECK(overridden.out.find("# alpha=1\n") != std::string::npos);
  std::filesystem::remove(path);
}

TEST_CASE("--out writes a file") {
  const auto path = temp_file("out.csv");
  const auto r = run({"pressure", "--alpha", "1", "--lambda-grid", "0.5", "--out", path.c_str(),
                      "--no-header-timestamp"});
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  CHECK(ss.str().find("0.5,0.26039505099275") != std::string::npos);
  std::filesystem::remove(path);
}

TEST_CASE("exit codes") {
  CHECK(run({}).code == cli::kExitConfig);
  CHECK(run({"pressure"}).code == cli::kExitConfig);
  CHECK(run({"pressure", "--alpha", "-1"}).code == cli::kExitConfig);
  CHECK(run({"pressure", "--alpha", "2", "--lambda-grid", "1:0:1"}).code == cli::kExitConfig);
  CHECK(run({"pmf", "--model", "bogus"}).code == cli::kExitConfig);
  CHECK(run({"pmf", "--model", "yule", "--alpha", "2"}).code == cli::kExitConfig);
  CHECK(run({"path", "--alpha", "1", "--x", "0.3"}).code == cli::kExitConfig);
  CHECK(run({"rate", "--alpha", "2", "--x", "1.5"}).code == cli::kExitConfig);
  CHECK(run({"verify", "--suite", "0"}).code == cli::kExitConfig);
  CHECK(run({"verify", "--budget", "huge"}).code == cli::kExitConfig);
  CHECK(run({"pressure", "--format", "xml", "--alpha", "2"}).code == cli::kExitConfig);
  CHECK(run({"--help"}).code == cli::kExitOk);
  const auto e = run({"pmf", "--model", "linear:alpha=3/5,k0=0", "--n", "6"});
  CHECK(e.code == cli::kExitFailed);
  CHECK(e.err.find("s_3") != std::string::npos);
}

TEST_CASE("verify prints a pass/fail table") {
  const auto r = run({"verify", "--suite", "1,2,7", "--budget", "smoke"});
  CHECK(r.code == cli::kExitOk);
  CHECK(r.out.find("[PASS] 1 pressure consistency") != std::string::npos);
  CHECK(r.out.find("[PASS] 2 ODE verification") != std::string::npos);
  CHECK(r.out.find("[PASS] 7 real-rootedness") != std::string::npos);
  CHECK(r.out.find("3/3 criteria passed") != std::string::npos);
}
