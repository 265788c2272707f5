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

#include <optional>
#include <string>

#include "ambisteer/rotation.hpp"
#include "ambisteer/ssf.hpp"
#include "ambisteer/stft.hpp"
#include "ambisteer/tracker.hpp"
#include "ambisteer/trajectory.hpp"

namespace ambisteer {

enum class Guidance { StrongOracle, Fixed, Adaptive };

struct PipelineMode {
  Guidance guidance = Guidance::Adaptive;
  bool ar_tst = false;
  bool ar_ssf = false;

  /// Throws on inconsistent combinations; AR tracking requires an adaptive
  /// pipeline (no tracker exists otherwise).
  void validate() const;

  std::string tag() const;
};

struct PipelineConfig {
  StftConfig stft;
  TrackerConfig tracker;
  SsfConfig ssf;

  static PipelineConfig defaults() {
    PipelineConfig cfg;
    cfg.tracker = TrackerConfig::defaults(cfg.stft);
    return cfg;
  }
};

/// Per-frame audit record of the causal loop.
struct FrameLog {
  EulerZYZ pre_track_steering;   // rotation applied to the frame the tracker saw
  SphericalDirection estimate;   // absolute steered direction after the step
};

struct PipelineResult {
  AudioClip enhanced;               // mono monopole estimate
  SpectrogramTensor enhanced_spec;  // 1-channel, same frame grid as the input
  Trajectory estimated;             // absolute steered direction per frame
  std::vector<FrameLog> log;
};

/// Runs the causal extraction loop over one utterance. Per frame: rotate the
/// observation by the transpose of the current steering matrix, optionally
/// track and apply the incremental re-steering correction, enhance, and feed
/// the enhanced frame back. `init_dir` is the target direction at t = 0;
/// StrongOracle additionally requires the full ground-truth trajectory.
/// A custom tracker may be injected for testing.
PipelineResult run_pipeline(const AudioClip& mixture,
                            const SphericalDirection& init_dir,
                            const PipelineMode& mode, const Trajectory* oracle,
                            const PipelineConfig& cfg,
                            TrackerInterface* tracker_override = nullptr);

/// The per-frame absolute steered direction of a completed run.
Trajectory steering_trace(const PipelineResult& result);

}  // namespace ambisteer
