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
#include <span>
#include <string>
#include <vector>

#include "ambisteer/trajectory.hpp"
#include "ambisteer/types.hpp"

namespace ambisteer {

/// Great-circle angle between two directions, degrees in [0, 180].
double angular_error_deg(const SphericalDirection& a, const SphericalDirection& b);

/// Mean per-frame angular error; trajectories must have equal length.
double utterance_mae_deg(const Trajectory& est, const Trajectory& truth);

inline constexpr double kSiSdrCapDb = 60.0;

/// Scale-invariant SDR in dB, capped at +/- kSiSdrCapDb. Throws on a zero
/// reference.
double si_sdr_db(std::span<const double> est, std::span<const double> ref);

/// Minimum over frames and interferers of the target-interferer angle,
/// degrees. Distances are averaged over a centered `window` of frames
/// (default 1 = raw per-frame minimum) before taking the minimum.
double min_interferer_distance_deg(const Trajectory& target,
                                   const std::vector<Trajectory>& interferers,
                                   int window = 1);

/// Non-overlapping, exhaustive partition of [0, 180] degrees.
struct BinEdges {
  std::vector<double> edges{0.0, 15.0, 30.0, 60.0, 180.0};

  int count() const { return static_cast<int>(edges.size()) - 1; }
  int bin_of(double deg) const;
  std::string label(int bin) const;
  void validate() const;
};

struct EvalRecord {
  std::string scene_id;
  std::string mode;
  double mae_deg = 0.0;
  double si_sdr_db = 0.0;
  double min_interferer_deg = 180.0;
  double runtime_s = 0.0;
};

struct SummaryRow {
  std::string mode;
  std::string bin_label;  // "all" for the per-mode aggregate
  int count = 0;
  double mae_mean = 0.0, mae_ci = 0.0;
  double si_sdr_mean = 0.0, si_sdr_ci = 0.0;
};

/// Per-(mode, distance-bin) means with 95% normal-approximation confidence
/// intervals, plus one "all" row per mode. Requires at least two records per
/// populated group; throws on an empty record set.
std::vector<SummaryRow> summarize(const std::vector<EvalRecord>& records,
                                  const BinEdges& bins = {});

void write_records_csv(const std::filesystem::path& path,
                       const std::vector<EvalRecord>& records);
std::vector<EvalRecord> read_records_csv(const std::filesystem::path& path);
void write_summary_csv(const std::filesystem::path& path,
                       const std::vector<SummaryRow>& rows);
void write_summary_markdown(const std::filesystem::path& path,
                            const std::vector<SummaryRow>& rows);

}  // namespace ambisteer
