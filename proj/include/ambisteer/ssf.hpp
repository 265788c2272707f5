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

#include <complex>
#include <vector>

#include "ambisteer/stft.hpp"

namespace ambisteer {

enum class BeamformerType {
  MaxDi,     // first-order hypercardioid, directivity factor 4
  Cardioid,  // family a + (1-a) cos, a = shape
};

struct SsfConfig {
  BeamformerType beamformer = BeamformerType::MaxDi;
  double cardioid_shape = 0.5;  // omni weight for BeamformerType::Cardioid
  bool postfilter_enabled = true;
  bool ar_enabled = false;
  double dd_smoothing = 0.98;  // decision-directed a-priori SNR factor
  double gain_floor = 0.1;     // -20 dB
  double noise_window_s = 1.5;       // minimum-statistics sliding window
  double noise_bias = 1.5;           // bias compensation on the minimum
  double periodogram_smoothing = 0.85;
  double blocked_smoothing = 0.6;    // blocked-channel noise reference smoothing

  void validate() const;

  /// {omni, front-dipole} beam weights; always sums to 1 (distortionless).
  std::pair<double, double> beam_gains() const;
};

struct SsfState {
  std::vector<std::complex<double>> prev_enhanced;  // S_{t-1}
  std::vector<double> prior_snr;                    // last a-priori SNR
  std::vector<double> noise_psd;                    // last noise estimate
  long frame = 0;
};

/// Spatially selective filter on a target-at-front steered FOA frame: a
/// fixed first-order beam toward front followed by a Wiener-style
/// postfilter. The noise PSD combines a minimum-statistics sliding minimum
/// on the beam output with an instantaneous estimate from the front-blocked
/// dipole channels (Y, Z), which are target-free when steering is exact.
/// In AR mode the decision-directed a-priori SNR is anchored on the previous
/// enhanced frame. Sequential per utterance; not thread-safe.
class SpatialFilter {
 public:
  SpatialFilter(const SsfConfig& cfg, const StftConfig& stft);

  /// Distortionless front beam: out_k = g_w W_k + g_x X_k.
  void beamform(const std::complex<double>* frame, int bins, int channels,
                std::complex<double>* out) const;

  /// Wiener gains for the current frame; advances the noise-tracking state.
  std::vector<double> postfilter(const std::complex<double>* beamformed,
                                 const std::complex<double>* frame, int bins,
                                 int channels);

  /// Full step: beamform, gain, store the enhanced frame for t+1.
  void enhance_step(const std::complex<double>* frame, int bins, int channels,
                    std::complex<double>* out);

  void reset();
  const SsfState& state() const { return state_; }
  const std::vector<std::complex<double>>& previous_enhanced() const {
    return state_.prev_enhanced;
  }
  const SsfConfig& config() const { return cfg_; }

 private:
  SsfConfig cfg_;
  StftConfig stft_;
  double g_omni_, g_dipole_;
  int subwindow_len_;

  SsfState state_;
  std::vector<double> smoothed_psd_;
  std::vector<double> subwindow_min_;
  std::vector<std::vector<double>> min_ring_;  // past subwindow minima
  int ring_fill_ = 0, ring_pos_ = 0, subwindow_count_ = 0;
  std::vector<double> blocked_psd_;
};

}  // namespace ambisteer
