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

#include "ambisteer/stft.hpp"

#include <cmath>
#include <stdexcept>

#include "ambisteer/types.hpp"

namespace ambisteer {

void StftConfig::validate() const {
  if (sample_rate <= 0) throw std::invalid_argument("StftConfig: bad sample rate");
  if (window_len <= 0 || window_len % 2 != 0)
    throw std::invalid_argument("StftConfig: window length must be even and positive");
  if (hop * 2 != window_len)
    throw std::invalid_argument("StftConfig: hop must be window_len/2");
}

StftConfig StftConfig::for_sample_rate(int fs) {
  StftConfig cfg;
  cfg.sample_rate = fs;
  int w = static_cast<int>(std::lround(0.032 * fs));
  if (w % 2) ++w;
  cfg.window_len = w;
  cfg.hop = w / 2;
  cfg.validate();
  return cfg;
}

SpectrogramTensor SpectrogramTensor::zeros(const StftConfig& cfg, int frames,
                                           int channels) {
  SpectrogramTensor s;
  s.config = cfg;
  s.frames = frames;
  s.bins = cfg.bins();
  s.channels = channels;
  s.data.assign(static_cast<std::size_t>(frames) * s.bins * channels, {0.0, 0.0});
  return s;
}

double SpectrogramTensor::energy() const {
  double e = 0.0;
  for (const auto& v : data) e += std::norm(v);
  return e;
}

Stft::Stft(const StftConfig& cfg) : cfg_(cfg), fft_(cfg.window_len) {
  cfg_.validate();
  window_.resize(cfg_.window_len);
  for (int i = 0; i < cfg_.window_len; ++i) {
    const double hann = 0.5 - 0.5 * std::cos(kTwoPi * i / cfg_.window_len);
    window_[i] = std::sqrt(hann);
  }
}

int Stft::frame_count(std::size_t samples, const StftConfig& cfg) {
  if (samples < static_cast<std::size_t>(cfg.window_len))
    throw std::invalid_argument("Stft: input shorter than one window");
  const std::size_t extra = samples - cfg.window_len;
  return 1 + static_cast<int>((extra + cfg.hop - 1) / cfg.hop);
}

std::size_t Stft::synthesis_length(int frames, const StftConfig& cfg) {
  return static_cast<std::size_t>(frames - 1) * cfg.hop + cfg.window_len;
}

SpectrogramTensor Stft::analyze(const AudioClip& x) {
  if (x.channel_count() == 0) throw std::invalid_argument("Stft: no channels");
  if (x.sample_rate != cfg_.sample_rate)
    throw std::invalid_argument("Stft: sample-rate mismatch");
  const int frames = frame_count(x.sample_count(), cfg_);
  SpectrogramTensor spec = SpectrogramTensor::zeros(cfg_, frames, x.channel_count());

  std::vector<double> buf(cfg_.window_len);
  std::vector<std::complex<double>> fbuf(cfg_.bins());
  const std::size_t n = x.sample_count();
  for (int c = 0; c < x.channel_count(); ++c) {
    const std::vector<double>& ch = x.channels[c];
    for (int t = 0; t < frames; ++t) {
      const std::size_t off = static_cast<std::size_t>(t) * cfg_.hop;
      for (int i = 0; i < cfg_.window_len; ++i) {
        const std::size_t s = off + i;
        buf[i] = (s < n) ? window_[i] * ch[s] : 0.0;
      }
      fft_.forward(buf.data(), fbuf.data());
      for (int k = 0; k < spec.bins; ++k) spec.at(t, k, c) = fbuf[k];
    }
  }
  return spec;
}

SpectrogramTensor Stft::analyze_mono(const std::vector<double>& x, int sample_rate) {
  AudioClip clip;
  clip.sample_rate = sample_rate;
  clip.channels.push_back(x);
  return analyze(clip);
}

AudioClip Stft::synthesize(const SpectrogramTensor& spec) {
  if (spec.config != cfg_)
    throw std::invalid_argument("Stft: spectrogram config mismatch");
  if (spec.frames == 0) throw std::invalid_argument("Stft: empty spectrogram");

  const std::size_t out_len = synthesis_length(spec.frames, cfg_);
  AudioClip out(cfg_.sample_rate, spec.channels, out_len);

  std::vector<std::complex<double>> fbuf(cfg_.bins());
  std::vector<double> buf(cfg_.window_len);
  for (int c = 0; c < spec.channels; ++c) {
    std::vector<double>& ch = out.channels[c];
    for (int t = 0; t < spec.frames; ++t) {
      for (int k = 0; k < spec.bins; ++k) fbuf[k] = spec.at(t, k, c);
      fft_.inverse(fbuf.data(), buf.data());
      const std::size_t off = static_cast<std::size_t>(t) * cfg_.hop;
      for (int i = 0; i < cfg_.window_len; ++i)
        ch[off + i] += window_[i] * buf[i];
    }
  }
  return out;
}

}  // namespace ambisteer
