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
#include <memory>
#include <vector>

#include "ambisteer/audio.hpp"
#include "ambisteer/fft.hpp"

namespace ambisteer {

/// Square-root Hann analysis/synthesis at 50% overlap (COLA). Defaults are a
/// 32 ms window and 16 ms hop at 16 kHz.
struct StftConfig {
  int sample_rate = 16000;
  int window_len = 512;
  int hop = 256;

  int bins() const { return window_len / 2 + 1; }
  double hop_seconds() const { return static_cast<double>(hop) / sample_rate; }
  void validate() const;

  /// 32 ms / 16 ms parametrization for an arbitrary rate (window rounded to
  /// the nearest even sample count).
  static StftConfig for_sample_rate(int fs);

  bool operator==(const StftConfig&) const = default;
};

/// Complex STFT data indexed (frame, bin, channel); channels vary fastest.
struct SpectrogramTensor {
  StftConfig config;
  int frames = 0;
  int bins = 0;
  int channels = 0;
  std::vector<std::complex<double>> data;

  static SpectrogramTensor zeros(const StftConfig& cfg, int frames, int channels);

  std::complex<double>& at(int t, int k, int c) {
    return data[(static_cast<std::size_t>(t) * bins + k) * channels + c];
  }
  const std::complex<double>& at(int t, int k, int c) const {
    return data[(static_cast<std::size_t>(t) * bins + k) * channels + c];
  }

  /// Pointer to the contiguous bins*channels block of frame t.
  std::complex<double>* frame(int t) {
    return data.data() + static_cast<std::size_t>(t) * bins * channels;
  }
  const std::complex<double>* frame(int t) const {
    return data.data() + static_cast<std::size_t>(t) * bins * channels;
  }

  double energy() const;
};

/// Analysis/synthesis filterbank. Frame t covers samples
/// [t*hop, t*hop + window_len); there is no pre-padding, so outputs are
/// causal in the input. Not thread-safe; create one instance per thread.
class Stft {
 public:
  explicit Stft(const StftConfig& cfg);

  /// Requires at least one full window of input; the tail is zero-padded to
  /// complete the final frame.
  SpectrogramTensor analyze(const AudioClip& x);
  SpectrogramTensor analyze_mono(const std::vector<double>& x, int sample_rate);

  /// Weighted overlap-add inverse. Output length (frames-1)*hop + window_len.
  /// Reconstruction is exact on [hop, frames*hop); the first hop and the
  /// trailing window ramp carry partial window sums.
  AudioClip synthesize(const SpectrogramTensor& spec);

  static int frame_count(std::size_t samples, const StftConfig& cfg);
  static std::size_t synthesis_length(int frames, const StftConfig& cfg);

  const StftConfig& config() const { return cfg_; }
  const std::vector<double>& window() const { return window_; }

 private:
  StftConfig cfg_;
  std::vector<double> window_;
  RealFft fft_;
};

}  // namespace ambisteer
