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

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ambisteer/metrics.hpp"
#include "ambisteer/pipeline.hpp"
#include "ambisteer/scene.hpp"

namespace ambisteer {

/// Errors that map to distinct CLI exit codes.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Speech-shaped test signal: voiced harmonic runs with drifting pitch and
/// formants, interleaved noise bursts and pauses. Unit RMS over active spans.
std::vector<double> synth_speechlike(Rng& rng, double seconds, int sample_rate);

/// Dataset-generation configuration (JSON-loadable). All angles in the file
/// are degrees; conversion happens at this boundary only.
struct DatasetConfig {
  int scene_count = 10;
  std::uint64_t seed = 1;
  double duration_s = 4.0;
  int num_sources = 3;
  int sample_rate = 16000;

  Eigen::Vector3d room_min{5.0, 4.0, 2.6};
  Eigen::Vector3d room_max{9.0, 7.0, 3.5};
  double rt60_min = 0.2;
  double rt60_max = 0.5;
  bool allow_rt60_outside = false;  // the dataset contract pins [0.2, 0.5] s

  TrajectoryBounds trajectory;
  double min_start_separation_deg = 15.0;

  std::vector<std::string> source_wavs;  // empty: synthesize speech-like sources

  void validate() const;
  static DatasetConfig from_json_file(const std::filesystem::path& path);
  std::string canonical_json() const;
};

/// Generates one scene deterministically from (config, scene_index): room,
/// trajectories (with the start-separation and in-room constraints), and
/// source signals. Sources are returned in memory; `simulate_dataset` writes
/// them to disk.
struct GeneratedScene {
  SceneManifest manifest;
  std::vector<std::vector<double>> sources;
};
GeneratedScene generate_scene(const DatasetConfig& cfg, int scene_index);

/// Writes dataset.json plus per-scene manifest, source/mixture/target WAVs
/// and trajectory CSVs under out_dir/scenes/scene_NNNN/.
void simulate_dataset(const DatasetConfig& cfg,
                      const std::filesystem::path& out_dir, int jobs = 1);

struct RunOptions {
  PipelineMode mode;
  PipelineConfig pipeline = PipelineConfig::defaults();
  int jobs = 1;
  bool resume = true;  // skip scenes already produced with the same hash
};

/// Runs the pipeline over every scene of a dataset; writes enhanced.wav,
/// estimated.csv and meta.json per scene plus run.json at the root.
void run_dataset(const std::filesystem::path& dataset_dir,
                 const RunOptions& options, const std::filesystem::path& out_dir);

struct EvalOptions {
  BinEdges bins;
};

/// Evaluates completed runs against their datasets' ground truth; writes
/// records.csv, summary.csv and summary.md to out_dir and returns the
/// records (sorted by scene then mode, so reports are reproducible).
std::vector<EvalRecord> eval_runs(const std::vector<std::filesystem::path>& run_dirs,
                                  const std::filesystem::path& out_dir,
                                  const EvalOptions& options = {});

/// FNV-1a of a canonical config dump; stamps run outputs for resumability.
std::uint64_t config_hash(const std::string& canonical);

}  // namespace ambisteer
