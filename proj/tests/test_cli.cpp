// Copyright 2026 The qmd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"

using namespace qmd;
using namespace qmd::cli;

namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun invoke(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.push_back("qmd");
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("grid and factor-list parsing") {
  const SweepGrid g = parse_grid("0.01:0.99:0.01");
  const auto v = g.values();
  CHECK(v.size() == 99);
  CHECK(v.front() == 0.01);
  CHECK(v.back() == doctest::Approx(0.99).epsilon(1e-12));

  CHECK_THROWS_AS((void)parse_grid("1:2"), ConfigError);
  CHECK_THROWS_AS((void)parse_grid("a:b:c"), ConfigError);
  CHECK_THROWS_AS((void)parse_grid("0:1:0"), ConfigError);
  CHECK_THROWS_AS((void)parse_grid("1:0:0.1"), ConfigError);

  const auto f = parse_factor_list("0,0.7,1");
  CHECK(f == std::vector<double>{0.0, 0.7, 1.0});
  CHECK_THROWS_AS((void)parse_factor_list("0,x"), ConfigError);
}

TEST_CASE("format_double: shortest round-trip") {
  CHECK(format_double(0.05) == "0.05");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(std::nan("")) == "nan");
  const double v = 0.1 + 0.2;
  CHECK(std::stod(format_double(v)) == v);
}

TEST_CASE("config parsing: defaults, overrides, strictness") {
  const RunConfig defaults = parse_config_text("{}", "inline");
  CHECK(defaults.well.box_length == 1.0);
  CHECK(defaults.well.n_max == 50);
  CHECK(defaults.factors == std::vector<double>{0.0, 0.7, 1.0});

  const RunConfig cfg = parse_config_text(R"({
    "insertion_point": 0.3,
    "temperature": 1.5,
    "coherence_factor": 0.7,
    "p_r": 0.05,
    "pr_grid": "0.1:0.9:0.1",
    "factors": [0, 1],
    "oracle": true,
    "seed": 9,
    "ihe": {"dim_reservoir": 4, "trials": 25, "seed": 3, "diagonal_preserving": true},
    "tolerances": {"psd": 1e-8}
  })",
                                          "inline");
  CHECK(cfg.well.insertion_point == 0.3);
  CHECK(cfg.well.temperature == 1.5);
  CHECK(cfg.coherence_factor == 0.7);
  REQUIRE(cfg.p_right.has_value());
  CHECK(*cfg.p_right == 0.05);
  REQUIRE(cfg.pr_grid.has_value());
  CHECK(cfg.pr_grid->step == 0.1);
  CHECK(cfg.factors == std::vector<double>{0.0, 1.0});
  CHECK(cfg.oracle);
  CHECK(cfg.seed == 9);
  CHECK(cfg.ihe.dim_reservoir == 4);
  CHECK(cfg.ihe.trials == 25);
  CHECK(cfg.ihe.seed == 3);
  CHECK(cfg.ihe_seed_set);
  CHECK(cfg.ihe.diagonal_preserving);
  CHECK(cfg.tol.psd == 1e-8);

  CHECK_THROWS_WITH_AS((void)parse_config_text(R"({"boxlength": 2})", "inline"),
                       "inline: unknown key \"boxlength\"", ConfigError);
  CHECK_THROWS_AS((void)parse_config_text(R"({"ihe": {"dims": [2,2,2]}})", "inline"),
                  ConfigError);
  CHECK_THROWS_AS((void)parse_config_text(R"({"temperature": "hot"})", "inline"),
                  ConfigError);
  CHECK_THROWS_AS((void)parse_config_text(R"({"n_max": 10.5})", "inline"), ConfigError);
  CHECK_THROWS_AS((void)parse_config_text("not json", "inline"), ConfigError);
}

TEST_CASE("schedule parsing cites node index and field") {
  const std::string good = R"({
    "temperature": 1.0,
    "nodes": [
      {"energies": [0, 1], "populations": [0.5, 0.5]},
      {"energies": [0, 2], "populations": [0.5, 0.5]}
    ]
  })";
  const auto schedule = parse_schedule_text(good, "sched");
  CHECK(schedule.nodes.size() == 2);
  CHECK(schedule.temperature == 1.0);

  try {
    (void)parse_schedule_text(R"({
      "temperature": 1.0,
      "nodes": [
        {"energies": [0, 1], "populations": [0.5, 0.5]},
        {"energies": [0, 1], "populations": "oops"}
      ]
    })",
                              "sched");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("node 1") != std::string::npos);
    CHECK(msg.find("populations") != std::string::npos);
  }

  CHECK_THROWS_AS((void)parse_schedule_text(R"({"nodes": []})", "sched"), ConfigError);
}

TEST_CASE("sweep: frozen columns, factor-major order, determinism") {
  RunConfig cfg;
  cfg.pr_grid = parse_grid("0.2:0.4:0.1");
  cfg.factors = {0.0, 1.0};
  std::ostringstream a, b;
  cmd_sweep(cfg, a);
  cmd_sweep(cfg, b);
  CHECK(a.str() == b.str());

  std::istringstream lines(a.str());
  std::string header;
  std::getline(lines, header);
  CHECK(header == "p_r,factor,eta,eta_carnot,w_tot,q_tot,q_coh,delta_cr,delta_sc,de_tot");
  std::string row;
  int rows = 0;
  int factor_switch = -1;
  while (std::getline(lines, row)) {
    if (rows < 3) {
      CHECK(row.find(",0,") != std::string::npos);  // factor-major: 0 first
    }
    ++rows;
    if (factor_switch < 0 && row.find(",1,") != std::string::npos) factor_switch = rows;
  }
  CHECK(rows == 6);
  CHECK(factor_switch == 4);
}

TEST_CASE("sweep over an insertion-point grid") {
  RunConfig cfg;
  cfg.l_grid = parse_grid("0.4:0.6:0.1");
  cfg.factors = {0.7};
  std::ostringstream out;
  cmd_sweep(cfg, out);
  std::istringstream lines(out.str());
  std::string line;
  std::getline(lines, line);  // header
  std::getline(lines, line);  // l = 0.4 row: p_r comes from the partition sums
  const double p_r = std::stod(line.substr(0, line.find(',')));
  CHECK(p_r > 0.5);  // narrow left chamber: particle favours the right
  CHECK(p_r < 1.0);

  RunConfig none;
  std::ostringstream sink;
  CHECK_THROWS_AS(cmd_sweep(none, sink), ConfigError);
}

TEST_CASE("run_main: cycle JSON, exit codes, determinism") {
  const CliRun ok = invoke({"cycle", "--p-r", "0.05", "--coherence-factor", "0.7"});
  CHECK(ok.code == 0);
  CHECK(ok.err.empty());
  CHECK(ok.out.find("\"eta\": 0.5659322397953761") != std::string::npos);
  CHECK(ok.out.find("\"eta_carnot\": 0.5") != std::string::npos);

  const CliRun again = invoke({"cycle", "--p-r", "0.05", "--coherence-factor", "0.7"});
  CHECK(again.out == ok.out);

  // Unknown flag: config failure, single-line JSON on the error stream.
  const CliRun bad_flag = invoke({"cycle", "--does-not-exist", "1"});
  CHECK(bad_flag.code == 2);
  CHECK(bad_flag.err.find("\"error\":\"ConfigError\"") != std::string::npos);
  CHECK(bad_flag.err.find('\n') == bad_flag.err.size() - 1);

  // Numerical failure: truncation at an absurd temperature.
  const CliRun hot = invoke({"cycle", "--temperature", "1e6"});
  CHECK(hot.code == 3);
  CHECK(hot.err.find("TruncationInsufficient") != std::string::npos);

  // Degenerate cycle surfaces as a structured error carrying the report.
  const CliRun degenerate =
      invoke({"cycle", "--demon-temperature", "1e9", "--coherence-factor", "0", "--p-r", "0.3"});
  CHECK(degenerate.code == 3);
  CHECK(degenerate.err.find("DegenerateCycle") != std::string::npos);
  CHECK(degenerate.err.find("\"report\"") != std::string::npos);

  // eta = null in the report embedded in the diagnostic.
  CHECK(degenerate.err.find("\"eta\":null") != std::string::npos);
}

TEST_CASE("run_main: critical and ihe surfaces") {
  const CliRun classical = invoke({"critical", "--coherence-factor", "0"});
  CHECK(classical.code == 0);
  CHECK(classical.out.find("\"p_r_cri\": null") != std::string::npos);
  CHECK(classical.out.find("\"p_r_cri_reason\": \"NoSignChange\"") != std::string::npos);
  CHECK(classical.out.find("\"p_r_zero\": 0.4793") != std::string::npos);

  const CliRun fuzzed = invoke({"ihe", "--trials", "5", "--seed", "11"});
  CHECK(fuzzed.code == 0);
  CHECK(fuzzed.out.find("\"trials\": 5") != std::string::npos);
  CHECK(fuzzed.out.find("\"min_slack\":") != std::string::npos);
  const CliRun fuzzed_again = invoke({"ihe", "--trials", "5", "--seed", "11"});
  CHECK(fuzzed.out == fuzzed_again.out);
}

TEST_CASE("run_main: path requires a schedule") {
  const CliRun missing = invoke({"path"});
  CHECK(missing.code == 2);
  CHECK(missing.err.find("schedule") != std::string::npos);
}

TEST_CASE("run_main: config file loading and flag precedence") {
  {
    std::ofstream f("cli_test_config.json", std::ios::binary);
    f << R"({"p_r": 0.05, "coherence_factor": 0.3, "demon_temperature": 0.5})";
  }
  const CliRun from_file = invoke({"cycle", "--config", "cli_test_config.json"});
  CHECK(from_file.code == 0);
  // Flag overrides the file value.
  const CliRun overridden =
      invoke({"cycle", "--config", "cli_test_config.json", "--coherence-factor", "0.7"});
  CHECK(overridden.code == 0);
  const CliRun direct = invoke({"cycle", "--p-r", "0.05", "--coherence-factor", "0.7"});
  CHECK(overridden.out == direct.out);
  CHECK(from_file.out != direct.out);
  std::remove("cli_test_config.json");

  {
    std::ofstream f("cli_test_schedule.json", std::ios::binary);
    f << R"({
      "temperature": 2.0,
      "nodes": [
        {"energies": [0, 1], "populations": [0.8, 0.2]},
        {"energies": [0, 3], "populations": [0.6, 0.4]}
      ]
    })";
  }
  const CliRun path_run = invoke({"path", "--schedule", "cli_test_schedule.json"});
  CHECK(path_run.code == 0);
  CHECK(path_run.out.find("\"endpoints\": \"absent\"") != std::string::npos);
  CHECK(path_run.out.find("\"q\": 0.4") != std::string::npos);
  CHECK(path_run.out.find("\"first_law_residual\":") != std::string::npos);
  std::remove("cli_test_schedule.json");
}
