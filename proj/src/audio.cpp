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

#include "ambisteer/audio.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace ambisteer {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

void put_u32(std::string& s, std::uint32_t v) {
  s.push_back(char(v & 0xff));
  s.push_back(char((v >> 8) & 0xff));
  s.push_back(char((v >> 16) & 0xff));
  s.push_back(char((v >> 24) & 0xff));
}

void put_u16(std::string& s, std::uint16_t v) {
  s.push_back(char(v & 0xff));
  s.push_back(char((v >> 8) & 0xff));
}

std::uint32_t get_u32(const char* p) {
  return std::uint32_t(std::uint8_t(p[0])) | std::uint32_t(std::uint8_t(p[1])) << 8 |
         std::uint32_t(std::uint8_t(p[2])) << 16 | std::uint32_t(std::uint8_t(p[3])) << 24;
}

std::uint16_t get_u16(const char* p) {
  return std::uint16_t(std::uint8_t(p[0]) | (std::uint8_t(p[1]) << 8));
}

}  // namespace

void write_wav(const std::filesystem::path& path, const AudioClip& clip) {
  const int nch = clip.channel_count();
  if (nch == 0) throw std::invalid_argument("write_wav: no channels");
  const std::size_t frames = clip.sample_count();
  for (const auto& ch : clip.channels)
    if (ch.size() != frames)
      throw std::invalid_argument("write_wav: ragged channel lengths");

  const std::uint32_t data_bytes =
      static_cast<std::uint32_t>(frames * nch * sizeof(float));
  std::string hdr;
  hdr.reserve(44);
  hdr += "RIFF";
  put_u32(hdr, 36 + data_bytes);
  hdr += "WAVEfmt ";
  put_u32(hdr, 16);
  put_u16(hdr, kFormatFloat);
  put_u16(hdr, static_cast<std::uint16_t>(nch));
  put_u32(hdr, static_cast<std::uint32_t>(clip.sample_rate));
  put_u32(hdr, static_cast<std::uint32_t>(clip.sample_rate * nch * sizeof(float)));
  put_u16(hdr, static_cast<std::uint16_t>(nch * sizeof(float)));
  put_u16(hdr, 32);
  hdr += "data";
  put_u32(hdr, data_bytes);

  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("write_wav: cannot open " + path.string());
  f.write(hdr.data(), static_cast<std::streamsize>(hdr.size()));

  std::vector<float> interleaved(frames * nch);
  for (std::size_t i = 0; i < frames; ++i)
    for (int c = 0; c < nch; ++c)
      interleaved[i * nch + c] = static_cast<float>(clip.channels[c][i]);
  f.write(reinterpret_cast<const char*>(interleaved.data()), data_bytes);
  if (!f) throw std::runtime_error("write_wav: write failed for " + path.string());
}

AudioClip read_wav(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("read_wav: cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(f)),
                    std::istreambuf_iterator<char>());
  if (bytes.size() < 44 || bytes.compare(0, 4, "RIFF") != 0 ||
      bytes.compare(8, 4, "WAVE") != 0)
    throw std::runtime_error("read_wav: not a RIFF/WAVE file: " + path.string());

  std::uint16_t format = 0, nch = 0, bits = 0;
  std::uint32_t rate = 0;
  std::size_t data_off = 0, data_len = 0;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::string id = bytes.substr(pos, 4);
    const std::uint32_t len = get_u32(bytes.data() + pos + 4);
    const std::size_t body = pos + 8;
    if (id == "fmt " && len >= 16) {
      format = get_u16(bytes.data() + body);
      nch = get_u16(bytes.data() + body + 2);
      rate = get_u32(bytes.data() + body + 4);
      bits = get_u16(bytes.data() + body + 14);
      if (format == kFormatExtensible && len >= 40)
        format = get_u16(bytes.data() + body + 24);  // first two bytes of SubFormat GUID
    } else if (id == "data") {
      data_off = body;
      data_len = std::min<std::size_t>(len, bytes.size() - body);
    }
    pos = body + len + (len & 1);
  }
  if (nch == 0 || rate == 0 || data_off == 0)
    throw std::runtime_error("read_wav: missing fmt/data chunk: " + path.string());

  const std::size_t bytes_per_sample = bits / 8;
  const std::size_t frames = data_len / (bytes_per_sample * nch);
  AudioClip clip(static_cast<int>(rate), nch, frames);
  const char* d = bytes.data() + data_off;

  for (std::size_t i = 0; i < frames; ++i) {
    for (int c = 0; c < nch; ++c) {
      const char* p = d + (i * nch + c) * bytes_per_sample;
      double v;
      if (format == kFormatFloat && bits == 32) {
        float fv;
        std::memcpy(&fv, p, 4);
        v = fv;
      } else if (format == kFormatPcm && bits == 16) {
        std::int16_t s;
        std::memcpy(&s, p, 2);
        v = s / 32768.0;
      } else if (format == kFormatPcm && bits == 24) {
        std::int32_t s = (std::uint8_t(p[0]) << 8) | (std::uint8_t(p[1]) << 16) |
                         (std::uint8_t(p[2]) << 24);
        v = (s >> 8) / 8388608.0;
      } else {
        throw std::runtime_error("read_wav: unsupported sample format in " +
                                 path.string());
      }
      clip.channels[c][i] = v;
    }
  }
  return clip;
}

}  // namespace ambisteer
