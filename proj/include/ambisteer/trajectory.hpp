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
#include <vector>

#include "ambisteer/types.hpp"

namespace ambisteer {

struct TrajectorySample {
  double azimuth = 0.0;    // radians
  double elevation = 0.0;  // radians
  double range_m = 1.5;
};

/// Direction and range of a source over time, sampled on the STFT hop grid
/// (sample i is the position at time i * hop_seconds).
struct Trajectory {
  double hop_seconds = 0.016;
  std::vector<TrajectorySample> samples;

  std::size_t size() const { return samples.size(); }
  SphericalDirection direction(std::size_t i) const {
    return SphericalDirection::checked(samples[i].azimuth, samples[i].elevation);
  }
  double duration_s() const {
    return samples.empty() ? 0.0 : (samples.size() - 1) * hop_seconds;
  }
};

/// CSV schema: header `frame,azimuth_rad,elevation_rad,range_m`, one row per
/// hop-grid sample.
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj);
Trajectory read_trajectory_csv(const std::filesystem::path& path,
                               double hop_seconds = 0.016);

struct Sinusoid {
  double offset = 0.0;
  double amplitude = 0.0;
  double frequency_hz = 0.0;
  double phase = 0.0;

  double eval(double t) const {
    return offset + amplitude * std::sin(kTwoPi * frequency_hz * t + phase);
  }
};

/// Draw bounds for one sinusoidal coordinate.
struct SinusoidBounds {
  double offset_min = 0.0, offset_max = 0.0;
  double amplitude_min = 0.0, amplitude_max = 0.0;
  double frequency_min_hz = 0.04, frequency_max_hz = 0.25;
};

/// Randomized-trajectory bounds. Defaults keep speakers in the 1-3 m range
/// band with mostly horizontal motion.
struct TrajectoryBounds {
  SinusoidBounds azimuth{-kPi, kPi, 0.0, deg_to_rad(60.0), 0.04, 0.25};
  SinusoidBounds elevation{deg_to_rad(-20.0), deg_to_rad(20.0), 0.0,
                           deg_to_rad(10.0), 0.04, 0.25};
  SinusoidBounds range{1.4, 2.6, 0.0, 0.5, 0.04, 0.2};
  double min_range_m = 1.0;
  double max_range_m = 3.0;
  int max_retries = 200;
};

struct TrajectoryParams {
  Sinusoid azimuth, elevation, range;
};

/// Draws sinusoid parameters and samples the trajectory on the hop grid;
/// rejection-resamples until the range stays inside [min, max] at every
/// sample. Throws (reporting the seed) if no draw satisfies the constraints
/// within max_retries.
Trajectory gen_trajectory(std::uint64_t seed, double duration_s,
                          double hop_seconds, const TrajectoryBounds& bounds,
                          TrajectoryParams* params_out = nullptr);

/// Samples explicit sinusoid parameters on the hop grid (no constraints).
Trajectory sample_trajectory(const TrajectoryParams& params, double duration_s,
                             double hop_seconds);

}  // namespace ambisteer
