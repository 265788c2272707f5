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

#include "ambisteer/tracker.hpp"

#include <cmath>
#include <stdexcept>

#include "ambisteer/rotation.hpp"

namespace ambisteer {

void TrackerConfig::validate(int bins) const {
  if (smoothing_constant < 0.0 || smoothing_constant >= 1.0)
    throw std::invalid_argument("TrackerConfig: smoothing outside [0, 1)");
  if (gate_angle <= 0.0) throw std::invalid_argument("TrackerConfig: gate must be positive");
  if (lo_bin < 0 || lo_bin >= hi_bin || hi_bin > bins)
    throw std::invalid_argument("TrackerConfig: bad frequency band");
  if (ar_mask_floor < 0.0 || ar_mask_floor > 1.0)
    throw std::invalid_argument("TrackerConfig: ar_mask_floor outside [0, 1]");
}

TrackerConfig TrackerConfig::defaults(const StftConfig& stft) {
  TrackerConfig cfg;
  const double bin_hz = static_cast<double>(stft.sample_rate) / stft.window_len;
  cfg.lo_bin = static_cast<int>(std::ceil(300.0 / bin_hz));
  cfg.hi_bin = std::min(stft.bins(), static_cast<int>(std::floor(4000.0 / bin_hz)) + 1);
  return cfg;
}

Eigen::Vector3d pseudo_intensity(const std::complex<double>* frame, int bins,
                                 int channels, const std::vector<double>& weights) {
  if (channels < 4)
    throw std::invalid_argument("pseudo_intensity: FOA frame required");
  if (static_cast<int>(weights.size()) != bins)
    throw std::invalid_argument("pseudo_intensity: weights/bins mismatch");
  Eigen::Vector3d acc = Eigen::Vector3d::Zero();
  for (int k = 0; k < bins; ++k) {
    const double w = weights[k];
    if (w == 0.0) continue;
    const std::complex<double>* v = frame + static_cast<std::size_t>(k) * channels;
    const std::complex<double> wc = std::conj(v[0]);
    acc.x() += w * (wc * v[3]).real();
    acc.y() += w * (wc * v[1]).real();
    acc.z() += w * (wc * v[2]).real();
  }
  return acc;
}

std::vector<double> ar_weights(const std::complex<double>* prev_enhanced,
                               const std::complex<double>* noisy_w, int bins,
                               int stride_w, const TrackerConfig& cfg) {
  constexpr double kEps = 1e-30;
  std::vector<double> w(bins);
  for (int k = 0; k < bins; ++k) {
    const double s2 = std::norm(prev_enhanced[k]);
    const double r2 = std::norm(noisy_w[static_cast<std::size_t>(k) * stride_w] -
                                prev_enhanced[k]);
    w[k] = std::max(cfg.ar_mask_floor, s2 / (s2 + r2 + kEps));
  }
  return w;
}

IntensityTracker::IntensityTracker(const TrackerConfig& cfg, const StftConfig& stft,
                                   const SphericalDirection& init_dir)
    : cfg_(cfg),
      init_dir_(SphericalDirection::checked(init_dir.azimuth, init_dir.elevation)) {
  cfg_.validate(stft.bins());
  band_weights_.assign(stft.bins(), 0.0);
  for (int k = cfg_.lo_bin; k < cfg_.hi_bin; ++k) band_weights_[k] = 1.0;
}

void IntensityTracker::reset() { state_ = TrackerState{}; }

SphericalDirection IntensityTracker::current_absolute() const {
  return SphericalDirection{wrap_angle(init_dir_.azimuth + state_.deviation.azimuth),
                            init_dir_.elevation + state_.deviation.elevation};
}

Deviation IntensityTracker::step(const std::complex<double>* frame, int bins,
                                 int channels,
                                 const std::complex<double>* prev_enhanced) {
  std::vector<double> weights = band_weights_;
  if (cfg_.ar_enabled && prev_enhanced) {
    const std::vector<double> arw =
        ar_weights(prev_enhanced, frame, bins, channels, cfg_);
    for (int k = 0; k < bins; ++k) weights[k] *= arw[k];
  }

  const Eigen::Vector3d inst = pseudo_intensity(frame, bins, channels, weights);
  const double lam = cfg_.smoothing_constant;
  state_.intensity = lam * state_.intensity + (1.0 - lam) * inst;
  ++state_.frame;

  const double norm = state_.intensity.norm();
  if (norm < 1e-300) return state_.deviation;  // silence: hold the estimate

  // The intensity direction is the residual deviation seen in the frame
  // steered by the current estimate; compose it back into absolute terms.
  const SphericalDirection cur = current_absolute();
  const Eigen::Vector3d residual = state_.intensity / norm;
  const Eigen::Vector3d proposed =
      euler_to_matrix(steering_euler(cur)) * residual;
  const Eigen::Vector3d prev_u = cur.unit();

  const double step_angle =
      std::atan2(prev_u.cross(proposed).norm(), prev_u.dot(proposed));
  Eigen::Vector3d next_u = proposed;
  if (step_angle > cfg_.gate_angle) {
    const double s = std::sin(step_angle);
    next_u = (std::sin(step_angle - cfg_.gate_angle) * prev_u +
              std::sin(cfg_.gate_angle) * proposed) /
             s;
    next_u.normalize();
  }

  const SphericalDirection next = SphericalDirection::from_unit(next_u);
  const double raw_dev_az = wrap_angle(next.azimuth - init_dir_.azimuth);
  state_.deviation.azimuth =
      state_.deviation.azimuth + wrap_angle(raw_dev_az - state_.deviation.azimuth);
  state_.deviation.elevation = next.elevation - init_dir_.elevation;
  return state_.deviation;
}

}  // namespace ambisteer
