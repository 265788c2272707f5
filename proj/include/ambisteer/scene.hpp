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

#include <Eigen/Core>
#include <filesystem>
#include <vector>

#include "ambisteer/audio.hpp"
#include "ambisteer/trajectory.hpp"
#include "ambisteer/types.hpp"

namespace ambisteer {

/// Shoebox room with a spherical-array pickup point. rt60 = 0 renders the
/// direct path only (anechoic).
struct RoomSpec {
  Eigen::Vector3d dimensions{6.0, 5.0, 3.0};   // meters
  double rt60 = 0.3;                           // seconds
  Eigen::Vector3d array_position{3.0, 2.5, 1.5};
  double speed_of_sound = 343.0;

  void validate() const;

  /// Uniform per-wall amplitude reflection coefficient from rt60 via
  /// Eyring's formula; 0 when rt60 is 0.
  double reflection_coefficient() const;
};

struct ImageSource {
  Eigen::Vector3d position;
  double amplitude;  // reflection products times 1/r spreading
};

/// Caps the mirror-image set either by total reflection count or by
/// propagation time to the array. Exactly one of the two must be active.
struct ImageSetLimit {
  int max_order = -1;       // >= 0: keep images with at most this many reflections
  double max_delay_s = -1;  // > 0: keep images arriving within this time

  static ImageSetLimit by_order(int order) { return {order, -1.0}; }
  static ImageSetLimit by_delay(double seconds) { return {-1, seconds}; }

  /// Delay cap covering the room's decay to -60 dB plus direct-path slack.
  static ImageSetLimit for_room(const RoomSpec& room) {
    return by_delay(room.rt60 + 0.02);
  }
};

/// Mirror-image expansion of a source in the room. Amplitudes carry the
/// per-reflection coefficient product and 1/r spreading toward the array.
std::vector<ImageSource> image_sources(const RoomSpec& room,
                                       const Eigen::Vector3d& source_position,
                                       const ImageSetLimit& limit);

/// One far-field plane-wave contribution.
struct FoaTap {
  Eigen::Vector3d direction;  // unit vector, array toward image
  double delay_s;
  double gain;
};

std::vector<FoaTap> encode_foa(const std::vector<ImageSource>& images,
                               const Eigen::Vector3d& array_position,
                               double speed_of_sound);

struct RenderOptions {
  int sample_rate = 16000;
  int hop = 256;        // trajectory grid, matches the STFT hop
  int sinc_taps = 32;   // fractional-delay kernel length
  ImageSetLimit limit;  // inactive (defaults) = derive from room rt60

  ImageSetLimit effective_limit(const RoomSpec& room) const {
    if (limit.max_order >= 0 || limit.max_delay_s > 0) return limit;
    return ImageSetLimit::for_room(room);
  }
};

/// Renders plane-wave taps into a 4-channel ambiX impulse response of
/// `length_s` (plus kernel slack), using windowed-sinc fractional delays.
AudioClip render_rir(const std::vector<FoaTap>& taps, int sample_rate,
                     double length_s, int sinc_taps = 32);

/// Renders a moving source: the image set is re-derived on every trajectory
/// hop and adjacent hop renders are blended with a one-hop triangular
/// crossfade (a static trajectory therefore reduces exactly to a single-RIR
/// convolution).
AudioClip render_moving(const std::vector<double>& source,
                        const Trajectory& trajectory, const RoomSpec& room,
                        const RenderOptions& opts = {});

struct SceneSource {
  std::string wav_path;  // relative to the manifest directory
  Trajectory trajectory;
};

/// Versioned on-disk description of one synthetic scene ("schema": 1).
struct SceneManifest {
  RoomSpec room;
  std::vector<SceneSource> sources;
  std::uint64_t seed = 0;
  int target_index = 0;

  /// Checks the dataset constraints: valid room, target index in range,
  /// ranges inside [1, 3] m, and pairwise start separation of at least
  /// `min_separation_deg`.
  void validate(double min_separation_deg = 15.0) const;
};

void write_scene_manifest(const std::filesystem::path& json_path,
                          const SceneManifest& manifest);
SceneManifest read_scene_manifest(const std::filesystem::path& json_path);

struct SceneOutput {
  AudioClip mixture;          // 4-channel ambiX sum of all reverberant renders
  AudioClip anechoic_target;  // mono: direct-path monopole of the target
};

/// Renders every source and sums them (fixed source order, so the mixture is
/// bit-reproducible); the target is additionally rendered direct-path-only.
/// Source WAVs are resolved relative to `base_dir`.
SceneOutput assemble_scene(const SceneManifest& manifest,
                           const std::filesystem::path& base_dir,
                           const RenderOptions& opts = {});

/// In-memory variant used by tests and the dataset generator.
SceneOutput assemble_scene_signals(const SceneManifest& manifest,
                                   const std::vector<std::vector<double>>& sources,
                                   const RenderOptions& opts = {});

}  // namespace ambisteer
