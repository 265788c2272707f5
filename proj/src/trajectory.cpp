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

#include "ambisteer/trajectory.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace ambisteer {

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("write_trajectory_csv: cannot open " + path.string());
  f << "frame,azimuth_rad,elevation_rad,range_m\n";
  char line[128];
  for (std::size_t i = 0; i < traj.samples.size(); ++i) {
    const TrajectorySample& s = traj.samples[i];
    std::snprintf(line, sizeof(line), "%zu,%.12g,%.12g,%.12g\n", i, s.azimuth,
                  s.elevation, s.range_m);
    f << line;
  }
}

Trajectory read_trajectory_csv(const std::filesystem::path& path, double hop_seconds) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("read_trajectory_csv: cannot open " + path.string());
  Trajectory traj;
  traj.hop_seconds = hop_seconds;
  std::string line;
  if (!std::getline(f, line))
    throw std::runtime_error("read_trajectory_csv: empty file " + path.string());
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string cell;
    TrajectorySample s;
    std::getline(ss, cell, ',');  // frame index, implicit by row order
    std::getline(ss, cell, ',');
    s.azimuth = std::stod(cell);
    std::getline(ss, cell, ',');
    s.elevation = std::stod(cell);
    std::getline(ss, cell, ',');
    s.range_m = std::stod(cell);
    traj.samples.push_back(s);
  }
  return traj;
}

Trajectory sample_trajectory(const TrajectoryParams& params, double duration_s,
                             double hop_seconds) {
  if (duration_s <= 0.0) throw std::invalid_argument("trajectory: duration must be positive");
  Trajectory traj;
  traj.hop_seconds = hop_seconds;
  const std::size_t count =
      static_cast<std::size_t>(std::floor(duration_s / hop_seconds)) + 1;
  traj.samples.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double t = i * hop_seconds;
    TrajectorySample s;
    s.azimuth = wrap_angle(params.azimuth.eval(t));
    s.elevation = params.elevation.eval(t);
    s.range_m = params.range.eval(t);
    traj.samples.push_back(s);
  }
  return traj;
}

namespace {

Sinusoid draw_sinusoid(Rng& rng, const SinusoidBounds& b) {
  Sinusoid s;
  s.offset = rng.uniform(b.offset_min, b.offset_max);
  s.amplitude = rng.uniform(b.amplitude_min, b.amplitude_max);
  s.frequency_hz = rng.uniform(b.frequency_min_hz, b.frequency_max_hz);
  s.phase = rng.uniform(0.0, kTwoPi);
  return s;
}

}  // namespace

Trajectory gen_trajectory(std::uint64_t seed, double duration_s,
                          double hop_seconds, const TrajectoryBounds& bounds,
                          TrajectoryParams* params_out) {
  Rng rng(seed);
  for (int attempt = 0; attempt < bounds.max_retries; ++attempt) {
    TrajectoryParams p;
    p.azimuth = draw_sinusoid(rng, bounds.azimuth);
    p.elevation = draw_sinusoid(rng, bounds.elevation);
    p.range = draw_sinusoid(rng, bounds.range);
    // Elevation must stay physical; azimuth wraps freely.
    if (std::abs(p.elevation.offset) + p.elevation.amplitude > kPi / 2) continue;

    Trajectory traj = sample_trajectory(p, duration_s, hop_seconds);
    bool ok = true;
    for (const TrajectorySample& s : traj.samples) {
      if (s.range_m < bounds.min_range_m || s.range_m > bounds.max_range_m) {
        ok = false;
        break;
      }
    }
    if (ok) {
      if (params_out) *params_out = p;
      return traj;
    }
  }
  throw std::runtime_error("gen_trajectory: constraints unsatisfied after " +
                           std::to_string(bounds.max_retries) +
                           " retries (seed " + std::to_string(seed) + ")");
}

}  // namespace ambisteer
