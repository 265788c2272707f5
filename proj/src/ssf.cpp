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

#include "ambisteer/ssf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ambisteer {

void SsfConfig::validate() const {
  if (cardioid_shape < 0.0 || cardioid_shape > 1.0)
    throw std::invalid_argument("SsfConfig: cardioid shape outside [0, 1]");
  if (dd_smoothing < 0.0 || dd_smoothing >= 1.0)
    throw std::invalid_argument("SsfConfig: dd_smoothing outside [0, 1)");
  if (gain_floor <= 0.0 || gain_floor > 1.0)
    throw std::invalid_argument("SsfConfig: gain floor must be in (0, 1]");
  if (noise_window_s <= 0.0 || noise_bias < 1.0)
    throw std::invalid_argument("SsfConfig: bad noise-tracking parameters");
}

std::pair<double, double> SsfConfig::beam_gains() const {
  if (beamformer == BeamformerType::MaxDi) return {0.25, 0.75};
  return {cardioid_shape, 1.0 - cardioid_shape};
}

namespace {
constexpr int kMinSubwindows = 8;
}

SpatialFilter::SpatialFilter(const SsfConfig& cfg, const StftConfig& stft)
    : cfg_(cfg), stft_(stft) {
  cfg_.validate();
  stft_.validate();
  std::tie(g_omni_, g_dipole_) = cfg_.beam_gains();
  const double frames_in_window = cfg_.noise_window_s / stft_.hop_seconds();
  subwindow_len_ =
      std::max(1, static_cast<int>(std::lround(frames_in_window / kMinSubwindows)));
  reset();
}

void SpatialFilter::reset() {
  const int k = stft_.bins();
  state_ = SsfState{};
  state_.prev_enhanced.assign(k, {0.0, 0.0});
  state_.prior_snr.assign(k, 0.0);
  state_.noise_psd.assign(k, 0.0);
  smoothed_psd_.assign(k, 0.0);
  subwindow_min_.assign(k, std::numeric_limits<double>::infinity());
  min_ring_.assign(kMinSubwindows, {});
  ring_fill_ = ring_pos_ = subwindow_count_ = 0;
  blocked_psd_.assign(k, 0.0);
}

void SpatialFilter::beamform(const std::complex<double>* frame, int bins,
                             int channels, std::complex<double>* out) const {
  if (channels < 4) throw std::invalid_argument("beamform: FOA frame required");
  for (int k = 0; k < bins; ++k) {
    const std::complex<double>* v = frame + static_cast<std::size_t>(k) * channels;
    out[k] = g_omni_ * v[0] + g_dipole_ * v[3];
  }
}

std::vector<double> SpatialFilter::postfilter(const std::complex<double>* beamformed,
                                              const std::complex<double>* frame,
                                              int bins, int channels) {
  if (channels < 4) throw std::invalid_argument("postfilter: FOA frame required");
  const bool first = (state_.frame == 0);
  const double ap = cfg_.periodogram_smoothing;
  const double ab = cfg_.blocked_smoothing;
  // Beam output power of an isotropic field, relative to the omni power
  // sigma^2 estimated from the front-blocked dipoles.
  const double blocked_cal =
      (g_omni_ * g_omni_ + g_dipole_ * g_dipole_ / 3.0) * 1.5;

  std::vector<double> gains(bins);
  for (int k = 0; k < bins; ++k) {
    const double p = std::norm(beamformed[k]);

    // Minimum statistics on the smoothed beam periodogram.
    smoothed_psd_[k] = first ? p : ap * smoothed_psd_[k] + (1.0 - ap) * p;
    subwindow_min_[k] = std::min(subwindow_min_[k], smoothed_psd_[k]);
    double min_psd = subwindow_min_[k];
    for (int u = 0; u < ring_fill_; ++u) min_psd = std::min(min_psd, min_ring_[u][k]);

    // Instantaneous spatial reference from the channels with a front null.
    const std::complex<double>* v = frame + static_cast<std::size_t>(k) * channels;
    const double blocked = blocked_cal * (std::norm(v[1]) + std::norm(v[2]));
    blocked_psd_[k] = first ? blocked : ab * blocked_psd_[k] + (1.0 - ab) * blocked;

    const double noise = std::max(cfg_.noise_bias * min_psd, blocked_psd_[k]);
    state_.noise_psd[k] = noise;

    const double gamma = p / (noise + 1e-300);
    const double ml = std::max(gamma - 1.0, 0.0);
    double xi;
    if (cfg_.ar_enabled) {
      const double anchor =
          first ? p : std::norm(state_.prev_enhanced[k]);
      xi = cfg_.dd_smoothing * anchor / (noise + 1e-300) +
           (1.0 - cfg_.dd_smoothing) * ml;
    } else {
      xi = ml;
    }
    state_.prior_snr[k] = xi;
    gains[k] = std::max(cfg_.gain_floor, xi / (1.0 + xi));
  }

  if (++subwindow_count_ >= subwindow_len_) {
    min_ring_[ring_pos_] = subwindow_min_;
    ring_pos_ = (ring_pos_ + 1) % kMinSubwindows;
    ring_fill_ = std::min(ring_fill_ + 1, kMinSubwindows);
    std::fill(subwindow_min_.begin(), subwindow_min_.end(),
              std::numeric_limits<double>::infinity());
    subwindow_count_ = 0;
  }
  return gains;
}

void SpatialFilter::enhance_step(const std::complex<double>* frame, int bins,
                                 int channels, std::complex<double>* out) {
  if (bins != stft_.bins())
    throw std::invalid_argument("enhance_step: bin count mismatch");
  beamform(frame, bins, channels, out);
  if (cfg_.postfilter_enabled) {
    const std::vector<double> gains = postfilter(out, frame, bins, channels);
    for (int k = 0; k < bins; ++k) out[k] *= gains[k];
  }
  std::copy(out, out + bins, state_.prev_enhanced.begin());
  ++state_.frame;
}

}  // namespace ambisteer
