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

// Command-line front end: `sweep` writes the panel CSVs, the remaining
// subcommands print one library result each.

#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "cps/error.hpp"
#include "cps/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Cooperative production and sharing game for P2P networks"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  app.add_option("--config", config_path, "Experiment config file");
  auto* out_opt = app.add_option("--out", out_dir, "Output directory");
  auto* seed_opt = app.add_option("--seed", seed, "Random seed");

  app.add_subcommand("sweep", "Sweep N and write the panel CSV files");

  cps::ReportOptions opts;
  int deviant = -1;
  for (const auto& name : cps::report_subcommands()) {
    auto* sub = app.add_subcommand(name, "Print the " + name + " report");
    sub->add_option("--n", opts.n, "Number of peers")->capture_default_str();
    if (name == "price-dynamics" || name == "quantity-dynamics") {
      sub->add_option("--eta", opts.eta, "Adjustment rate")->capture_default_str();
      sub->add_option("--step", opts.step, "Euler step")->capture_default_str();
      sub->add_option("--max-iters", opts.max_iters, "Iteration cap")
          ->capture_default_str();
    }
    if (name == "price-dynamics") {
      sub->add_option("--p0", opts.p0, "Initial price (default 0.5 p*)");
    }
    if (name == "quantity-dynamics") {
      sub->add_option("--x0", opts.x0, "Initial production per peer");
    }
    if (name == "repeated") {
      sub->add_option("--rounds", opts.rounds, "Horizon")->capture_default_str();
      sub->add_option("--deviant", deviant, "Peer that deviates once");
      sub->add_option("--deviation-round", opts.deviation_round,
                      "Round of the deviation")
          ->capture_default_str();
    }
    if (name == "group-size") {
      sub->add_option("--total-n", opts.total_n, "Population for the core test")
          ->capture_default_str();
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    cps::ExperimentConfig config;
    if (!config_path.empty()) config = cps::load_config(config_path);
    if (*out_opt) config.out_dir = out_dir;
    if (*seed_opt) config.seed = seed;
    if (deviant >= 0) opts.deviant = deviant;

    const auto* sub = app.get_subcommands().front();
    if (sub->get_name() == "sweep") {
      for (const auto& path : cps::run_figure_sweep(config)) {
        std::cout << path.string() << '\n';
      }
    } else {
      cps::print_report(std::cout, cps::run_report(config, sub->get_name(), opts));
    }
    return 0;
  } catch (const cps::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
