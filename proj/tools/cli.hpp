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

// Batch front-end: JSON config parsing with strict unknown-key rejection,
// the five subcommands (cycle, sweep, critical, ihe, path), deterministic
// CSV/JSON emission. Exit codes: 0 ok, 2 config, 3 numerical.

#ifndef QMD_TOOLS_CLI_HPP
#define QMD_TOOLS_CLI_HPP

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "qmd/ihe.hpp"
#include "qmd/pathtools.hpp"
#include "qmd/szilard.hpp"

namespace qmd::cli {

struct SweepGrid {
  double start = 0.0;
  double stop = 0.0;
  double step = 0.0;
  std::vector<double> values() const;
};

// "START:STOP:STEP"
SweepGrid parse_grid(const std::string& text);

// "0,0.7,1"
std::vector<double> parse_factor_list(const std::string& text);

struct RunConfig {
  szilard::WellConfig well;
  double coherence_factor = 0.0;
  double phase = 0.0;
  std::optional<double> p_right;  // imposes P_R directly when present
  std::vector<double> factors = {0.0, 0.7, 1.0};
  std::optional<SweepGrid> pr_grid;
  std::optional<SweepGrid> l_grid;
  bool oracle = false;
  std::uint64_t seed = 0;
  bool ihe_seed_set = false;  // config pinned ihe.seed explicitly
  ihe::IheConfig ihe;
  std::string schedule_path;
  std::string out_path;  // empty = stdout
  Tolerances tol;
};

RunConfig parse_config_text(const std::string& text, const std::string& origin);
RunConfig parse_config_file(const std::string& path);

path::PathSchedule parse_schedule_text(const std::string& text, const std::string& origin,
                                       const Tolerances& tol = {});
path::PathSchedule load_schedule(const std::string& path, const Tolerances& tol = {});

// Shortest decimal that round-trips back to the same double.
std::string format_double(double v);

void cmd_cycle(const RunConfig& cfg, std::ostream& out);
void cmd_sweep(const RunConfig& cfg, std::ostream& out);
void cmd_critical(const RunConfig& cfg, std::ostream& out);
void cmd_ihe(const RunConfig& cfg, std::ostream& out);
void cmd_path(const RunConfig& cfg, std::ostream& out);

// Full argv entry point used by the binary; catches everything and maps it
// onto the exit-code contract, with a one-line JSON diagnostic on err.
int run_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qmd::cli

#endif  // QMD_TOOLS_CLI_HPP
