// Copyright 2026 The cpsgame Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CPS_EXPERIMENT_HPP_
#define CPS_EXPERIMENT_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cps/game.hpp"
#include "cps/kernels.hpp"

namespace cps {

// Experiment settings. The file format is flat `key = value` lines grouped
// under `[section]` headers; `#` starts a comment:
//
//   [benefit]
//   kind = log            # or distinct_files, with a = ... and M = ...
//   [costs]
//   kappa = 0.3
//   delta = 0.0025
//   sigma = 0.01
//   [sweep]
//   n_min = 1
//   n_max = 100
//   schemes = none, pricing, intervention, repeated, full_sharing, cooperative
//   [run]
//   out = out
//   seed = 1
struct ExperimentConfig {
  std::string benefit = "log";
  double a = 2.0;
  long M = 100;
  double kappa = 0.3;
  double delta = 0.0025;
  double sigma = 0.01;
  int n_min = 1;
  int n_max = 100;
  std::set<std::string> schemes = all_schemes();
  std::filesystem::path out_dir = "out";
  std::uint64_t seed = 1;

  static std::set<std::string> all_schemes();
  CpsParams params(int n) const;
};

// Throws PreconditionError on bad syntax, unknown keys or invalid values.
ExperimentConfig parse_config(std::istream& in);
// Throws IoError if the file cannot be read.
ExperimentConfig load_config(const std::filesystem::path& path);
void validate(const ExperimentConfig& config);

// Shortest round-trip-stable decimal used in every CSV ("inf" for +inf).
std::string format_value(double v);

// File name -> CSV text for the six panels, rows "n,series,value".
std::map<std::string, std::string> figure_csvs(
    const ExperimentConfig& config,
    const std::vector<kernels::SweepRow>& rows);

// Sweeps N over the configured range (OpenMP kernel) and writes the six
// panel files into config.out_dir. Returns the written paths. Throws
// IoError if the directory or a file cannot be written.
std::vector<std::filesystem::path> run_figure_sweep(
    const ExperimentConfig& config);

struct ReportOptions {
  int n = 2;
  double p0 = 0.0;          // 0 means 0.5 p*
  double eta = 1.0;
  double step = 0.01;
  int max_iters = 100000;
  std::vector<double> x0;   // empty means x_beta per peer
  int rounds = 10000;
  std::optional<int> deviant;
  int deviation_round = 10;
  int total_n = 10;
};

struct Report {
  std::vector<std::string> lines;                            // human readable
  std::vector<std::pair<std::string, std::string>> values;  // key=value
};

inline const std::vector<std::string>& report_subcommands() {
  static const std::vector<std::string> names = {
      "solve",        "core",     "shapley",   "price-dynamics",
      "quantity-dynamics", "intervention", "repeated", "group-size"};
  return names;
}

// Runs one library operation and describes the result. Throws
// PreconditionError for an unknown subcommand or failed precondition.
Report run_report(const ExperimentConfig& config, const std::string& subcommand,
                  const ReportOptions& options);

void print_report(std::ostream& os, const Report& report);

}  // namespace cps

#endif  // CPS_EXPERIMENT_HPP_
