// Copyright 2025 The Ambisteer Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ambisteer/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

#include "ambisteer/experiment.hpp"

namespace ambisteer {

namespace {

namespace fs = std::filesystem;

fs::path resolve_out(const std::string& out, const std::string& leaf) {
  if (!out.empty()) return out;
  if (const char* root = std::getenv("AMBISTEER_OUT")) return fs::path(root) / leaf;
  throw ConfigError("no output directory: pass --out or set AMBISTEER_OUT");
}

Guidance parse_guidance(const std::string& s) {
  if (s == "strong") return Guidance::StrongOracle;
  if (s == "fixed") return Guidance::Fixed;
  if (s == "adaptive") return Guidance::Adaptive;
  throw ConfigError("unknown mode '" + s + "' (strong|fixed|adaptive)");
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Rotary-steered target speaker extraction toolkit"};
  app.require_subcommand(1);

  // --- simulate ---
  auto* sim = app.add_subcommand("simulate", "Generate a synthetic FOA dataset");
  std::string sim_config, sim_out;
  std::uint64_t sim_seed = 0;
  bool sim_seed_set = false;
  int sim_jobs = 1;
  sim->add_option("--config", sim_config, "Dataset config JSON")->required();
  sim->add_option("--out", sim_out, "Output directory (default $AMBISTEER_OUT/dataset)");
  sim->add_option("--seed", sim_seed, "Override the config seed")
      ->each([&](const std::string&) { sim_seed_set = true; });
  sim->add_option("--jobs", sim_jobs, "Parallel scene workers");

  // --- run ---
  auto* run = app.add_subcommand("run", "Run the extraction pipeline on a dataset");
  std::string run_dataset_dir, run_out, run_mode = "adaptive";
  bool run_ar_tst = false, run_ar_ssf = false, run_no_resume = false;
  int run_jobs = 1;
  run->add_option("--dataset", run_dataset_dir, "Dataset directory")->required();
  run->add_option("--out", run_out, "Run output directory");
  run->add_option("--mode", run_mode, "strong|fixed|adaptive");
  run->add_flag("--ar-tst", run_ar_tst, "Feed the enhanced signal to the tracker");
  run->add_flag("--ar-ssf", run_ar_ssf, "Feed the enhanced signal to the filter");
  run->add_flag("--no-resume", run_no_resume, "Recompute scenes even if done");
  run->add_option("--jobs", run_jobs, "Parallel scene workers");

  // --- eval ---
  auto* eval = app.add_subcommand("eval", "Score completed runs against ground truth");
  std::vector<std::string> eval_runs_dirs;
  std::string eval_out, eval_bins;
  eval->add_option("--runs", eval_runs_dirs, "Run directories")->required();
  eval->add_option("--out", eval_out, "Report directory");
  eval->add_option("--bins", eval_bins,
                   "Distance bin edges in degrees, e.g. 0,15,30,60,180");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfigError;
  }

  try {
    if (sim->parsed()) {
      DatasetConfig cfg = DatasetConfig::from_json_file(sim_config);
      if (sim_seed_set) cfg.seed = sim_seed;
      simulate_dataset(cfg, resolve_out(sim_out, "dataset"), sim_jobs);
      std::cout << "dataset written\n";
    } else if (run->parsed()) {
      RunOptions opts;
      opts.mode.guidance = parse_guidance(run_mode);
      opts.mode.ar_tst = run_ar_tst;
      opts.mode.ar_ssf = run_ar_ssf;
      try {
        opts.mode.validate();
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
      opts.jobs = run_jobs;
      opts.resume = !run_no_resume;
      run_dataset(run_dataset_dir, opts,
                  resolve_out(run_out, "run-" + opts.mode.tag()));
      std::cout << "run complete: " << opts.mode.tag() << "\n";
    } else if (eval->parsed()) {
      EvalOptions opts;
      if (!eval_bins.empty()) {
        opts.bins.edges.clear();
        std::istringstream ss(eval_bins);
        std::string cell;
        while (std::getline(ss, cell, ',')) opts.bins.edges.push_back(std::stod(cell));
        try {
          opts.bins.validate();
        } catch (const std::invalid_argument& e) {
          throw ConfigError(e.what());
        }
      }
      std::vector<fs::path> dirs(eval_runs_dirs.begin(), eval_runs_dirs.end());
      eval_runs(dirs, resolve_out(eval_out, "eval"), opts);
      std::cout << "report written\n";
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitDataError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInternalError;
  }
  return kExitOk;
}

}  // namespace ambisteer
