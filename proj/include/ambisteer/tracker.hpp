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
#include <complex>
#include <optional>
#include <vector>

#include "ambisteer/stft.hpp"
#include "ambisteer/types.hpp"

namespace ambisteer {

/// Azimuth/elevation offset from the initial target direction, radians.
struct Deviation {
  double azimuth = 0.0;
  double elevation = 0.0;
};

struct TrackerConfig {
  double smoothing_constant = 0.8;        // per-frame intensity smoothing, [0,1)
  double gate_angle = deg_to_rad(3.0);    // max direction change per frame
  int lo_bin = 10;                        // inclusive
  int hi_bin = 128;                       // exclusive
  bool ar_enabled = false;
  double ar_mask_floor = 0.1;

  void validate(int bins) const;

  /// Speech band (300 Hz - 4 kHz) for a given STFT parametrization.
  static TrackerConfig defaults(const StftConfig& stft);
};

struct TrackerState {
  Deviation deviation;
  Eigen::Vector3d intensity = Eigen::Vector3d::Zero();  // smoothed, steered frame
  long frame = 0;
};

/// Acoustic intensity direction estimate from one steered ambiX FOA frame:
/// sum_k w_k Re{conj(W_k) (X_k, Y_k, Z_k)}. Returns the zero vector for a
/// silent frame.
Eigen::Vector3d pseudo_intensity(const std::complex<double>* frame, int bins,
                                 int channels, const std::vector<double>& weights);

/// Per-bin confidence that the target dominates, from the previous enhanced
/// frame matched against the current steered omni channel:
/// w_k = max(floor, |S|^2 / (|S|^2 + |W - S|^2 + eps)).
std::vector<double> ar_weights(const std::complex<double>* prev_enhanced,
                               const std::complex<double>* noisy_w, int bins,
                               int stride_w, const TrackerConfig& cfg);

/// Tracker seam for the pipeline; `frame` is steered by the previous
/// steering estimate, `prev_enhanced` is the previous enhanced spectrum (null
/// when unavailable or AR is off).
class TrackerInterface {
 public:
  virtual ~TrackerInterface() = default;
  virtual Deviation step(const std::complex<double>* frame, int bins, int channels,
                         const std::complex<double>* prev_enhanced) = 0;
  virtual void reset() {}
};

/// Pseudo-intensity deviation tracker. Smooths the weighted intensity
/// vector, converts it to the direction seen in the steered frame, composes
/// it with the running estimate, and gates the per-frame change. Silent
/// frames hold the previous estimate.
class IntensityTracker : public TrackerInterface {
 public:
  IntensityTracker(const TrackerConfig& cfg, const StftConfig& stft,
                   const SphericalDirection& init_dir);

  Deviation step(const std::complex<double>* frame, int bins, int channels,
                 const std::complex<double>* prev_enhanced) override;
  void reset() override;

  const TrackerState& state() const { return state_; }
  SphericalDirection current_absolute() const;

 private:
  TrackerConfig cfg_;
  SphericalDirection init_dir_;
  TrackerState state_;
  std::vector<double> band_weights_;
};

}  // namespace ambisteer
