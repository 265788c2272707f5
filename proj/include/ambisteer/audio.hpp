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
#include <string>
#include <vector>

namespace ambisteer {

/// Multichannel audio held as one vector per channel. Ambisonics content is
/// ACN-ordered (FOA: W, Y, Z, X) with ambiX normalization.
struct AudioClip {
  int sample_rate = 16000;
  std::vector<std::vector<double>> channels;

  AudioClip() = default;
  AudioClip(int rate, int num_channels, std::size_t num_samples)
      : sample_rate(rate),
        channels(num_channels, std::vector<double>(num_samples, 0.0)) {}

  int channel_count() const { return static_cast<int>(channels.size()); }
  std::size_t sample_count() const {
    return channels.empty() ? 0 : channels[0].size();
  }
  double duration_s() const {
    return static_cast<double>(sample_count()) / sample_rate;
  }
};

/// Writes a 32-bit float WAV file (RIFF). Channel order as stored.
void write_wav(const std::filesystem::path& path, const AudioClip& clip);

/// Reads a WAV file; accepts 16/24-bit PCM and 32-bit float.
AudioClip read_wav(const std::filesystem::path& path);

}  // namespace ambisteer
