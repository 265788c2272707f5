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

#include "ambisteer/scene.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "ambisteer/fft.hpp"
#include "ambisteer/sh.hpp"

namespace ambisteer {

using nlohmann::json;

void RoomSpec::validate() const {
  if (dimensions.minCoeff() <= 0.0)
    throw std::invalid_argument("RoomSpec: non-positive dimension");
  if (rt60 < 0.0) throw std::invalid_argument("RoomSpec: negative rt60");
  if (speed_of_sound <= 0.0)
    throw std::invalid_argument("RoomSpec: non-positive speed of sound");
  for (int i = 0; i < 3; ++i)
    if (array_position[i] <= 0.0 || array_position[i] >= dimensions[i])
      throw std::invalid_argument("RoomSpec: array not strictly inside the room");
}

double RoomSpec::reflection_coefficient() const {
  if (rt60 <= 0.0) return 0.0;
  const double volume = dimensions.prod();
  const double surface = 2.0 * (dimensions.x() * dimensions.y() +
                                dimensions.x() * dimensions.z() +
                                dimensions.y() * dimensions.z());
  // Eyring: 1 - alpha = exp(-24 ln10 V / (c S T60)); amplitude = sqrt of it.
  const double log_energy =
      -24.0 * std::log(10.0) * volume / (speed_of_sound * surface * rt60);
  return std::exp(0.5 * log_energy);
}

namespace {

constexpr double kWallMargin = 1e-3;

void check_inside(const RoomSpec& room, const Eigen::Vector3d& p, const char* what) {
  for (int i = 0; i < 3; ++i)
    if (p[i] < kWallMargin || p[i] > room.dimensions[i] - kWallMargin)
      throw std::invalid_argument(std::string(what) + " not strictly inside the room");
}

// Per-axis mirror lattice: coordinate (1-2q)s + 2nL carries |n-q| + |n|
// reflections.
struct AxisImages {
  struct Entry {
    double coord;
    int reflections;
  };
  std::vector<Entry> entries;

  static AxisImages enumerate(double src, double array, double room_len,
                              double max_dist, int max_order) {
    AxisImages a;
    for (int q = 0; q <= 1; ++q) {
      const double base = (1 - 2 * q) * src;
      int n_lo, n_hi;
      if (max_dist > 0) {
        n_lo = static_cast<int>(std::ceil((array - max_dist - base) / (2.0 * room_len)));
        n_hi = static_cast<int>(std::floor((array + max_dist - base) / (2.0 * room_len)));
      } else {
        n_lo = -(max_order + 1);
        n_hi = max_order + 1;
      }
      for (int n = n_lo; n <= n_hi; ++n) {
        const int refl = std::abs(n - q) + std::abs(n);
        if (max_order >= 0 && refl > max_order) continue;
        a.entries.push_back({base + 2.0 * n * room_len, refl});
      }
    }
    return a;
  }
};

// Shared image-set walk: calls fn(position, reflection_count, distance) for
// every image within the limit.
template <typename Fn>
void for_each_image(const RoomSpec& room, const Eigen::Vector3d& source,
                    const ImageSetLimit& limit, Fn&& fn) {
  room.validate();
  check_inside(room, source, "image_sources: source");
  const double max_dist =
      limit.max_delay_s > 0 ? limit.max_delay_s * room.speed_of_sound : -1.0;
  const int max_order = limit.max_order;
  if (max_dist <= 0 && max_order < 0)
    throw std::invalid_argument("ImageSetLimit: no active cap");

  const Eigen::Vector3d& a = room.array_position;
  const AxisImages xs = AxisImages::enumerate(source.x(), a.x(), room.dimensions.x(),
                                              max_dist, max_order);
  const AxisImages ys = AxisImages::enumerate(source.y(), a.y(), room.dimensions.y(),
                                              max_dist, max_order);
  const AxisImages zs = AxisImages::enumerate(source.z(), a.z(), room.dimensions.z(),
                                              max_dist, max_order);
  const double r2max = max_dist > 0 ? max_dist * max_dist : 0.0;

  for (const auto& xe : xs.entries) {
    const double dx = xe.coord - a.x();
    const double dx2 = dx * dx;
    if (max_dist > 0 && dx2 > r2max) continue;
    for (const auto& ye : ys.entries) {
      if (max_order >= 0 && xe.reflections + ye.reflections > max_order) continue;
      const double dy = ye.coord - a.y();
      const double dxy2 = dx2 + dy * dy;
      if (max_dist > 0 && dxy2 > r2max) continue;
      for (const auto& ze : zs.entries) {
        const int refl = xe.reflections + ye.reflections + ze.reflections;
        if (max_order >= 0 && refl > max_order) continue;
        const double dz = ze.coord - a.z();
        const double r2 = dxy2 + dz * dz;
        if (max_dist > 0 && r2 > r2max) continue;
        fn(Eigen::Vector3d(xe.coord, ye.coord, ze.coord), refl, std::sqrt(r2));
      }
    }
  }
}

}  // namespace

std::vector<ImageSource> image_sources(const RoomSpec& room,
                                       const Eigen::Vector3d& source_position,
                                       const ImageSetLimit& limit) {
  const double beta = room.reflection_coefficient();
  std::vector<double> beta_pow{1.0};
  std::vector<ImageSource> images;
  for_each_image(room, source_position, limit,
                 [&](const Eigen::Vector3d& pos, int refl, double dist) {
                   while (static_cast<int>(beta_pow.size()) <= refl)
                     beta_pow.push_back(beta_pow.back() * beta);
                   const double amp = beta_pow[refl];
                   if (amp == 0.0 && refl > 0) return;
                   if (dist < kWallMargin)
                     throw std::invalid_argument("image_sources: image coincides with array");
                   images.push_back({pos, amp / dist});
                 });
  return images;
}

std::vector<FoaTap> encode_foa(const std::vector<ImageSource>& images,
                               const Eigen::Vector3d& array_position,
                               double speed_of_sound) {
  std::vector<FoaTap> taps;
  taps.reserve(images.size());
  for (const ImageSource& img : images) {
    const Eigen::Vector3d d = img.position - array_position;
    const double r = d.norm();
    if (r < kWallMargin)
      throw std::invalid_argument("encode_foa: image coincides with array");
    taps.push_back({d / r, r / speed_of_sound, img.amplitude});
  }
  return taps;
}

namespace {

// Hann-windowed sinc fractional-delay kernel, tabulated over subsample
// phases with linear interpolation between rows.
class FracDelayKernel {
 public:
  explicit FracDelayKernel(int taps) : taps_(taps), half_(taps / 2) {
    table_.resize(static_cast<std::size_t>(kPhases + 1) * taps_);
    for (int p = 0; p <= kPhases; ++p) {
      const double frac = static_cast<double>(p) / kPhases;
      for (int j = 0; j < taps_; ++j) {
        const double x = j - (half_ - 1) - frac;
        double v = 0.0;
        if (std::abs(x) <= half_) {
          const double s = (x == 0.0) ? 1.0 : std::sin(kPi * x) / (kPi * x);
          v = s * 0.5 * (1.0 + std::cos(kPi * x / half_));
        }
        table_[static_cast<std::size_t>(p) * taps_ + j] = v;
      }
    }
  }

  int taps() const { return taps_; }
  int lead() const { return half_ - 1; }  // taps placed from floor(delay)-lead

  /// Adds gains[c] * kernel(delay) into each of the four channel buffers.
  void accumulate_foa(std::vector<double>* ch, double delay_samples,
                      const double gains[4]) const {
    const double base_f = std::floor(delay_samples);
    const int base = static_cast<int>(base_f);
    const double frac = delay_samples - base_f;
    const double pf = frac * kPhases;
    const int p0 = static_cast<int>(pf);
    const double w = pf - p0;
    const double* r0 = table_.data() + static_cast<std::size_t>(p0) * taps_;
    const double* r1 = r0 + taps_;
    const int start = base - lead();
    for (int j = 0; j < taps_; ++j) {
      const int idx = start + j;
      if (idx < 0) continue;
      const double k = (1.0 - w) * r0[j] + w * r1[j];
      ch[0][idx] += gains[0] * k;
      ch[1][idx] += gains[1] * k;
      ch[2][idx] += gains[2] * k;
      ch[3][idx] += gains[3] * k;
    }
  }

 private:
  static constexpr int kPhases = 1024;
  int taps_;
  int half_;
  std::vector<double> table_;
};

// Accumulates the full image set of one source position into a 4-channel RIR
// buffer, growing it as needed. Returns the number of samples written.
std::size_t build_foa_rir(const RoomSpec& room, const Eigen::Vector3d& src,
                          const ImageSetLimit& limit, int fs,
                          const FracDelayKernel& kernel,
                          std::vector<double>* ch /* [4] */) {
  const double beta = room.reflection_coefficient();
  std::vector<double> beta_pow{1.0};
  const Eigen::Vector3d& a = room.array_position;
  std::size_t used = 0;
  for_each_image(room, src, limit,
                 [&](const Eigen::Vector3d& pos, int refl, double dist) {
                   while (static_cast<int>(beta_pow.size()) <= refl)
                     beta_pow.push_back(beta_pow.back() * beta);
                   const double amp = beta_pow[refl];
                   if (amp == 0.0 && refl > 0) return;
                   if (dist < kWallMargin)
                     throw std::invalid_argument("render: image coincides with array");
                   const double g = amp / dist;
                   const Eigen::Vector3d u = (pos - a) / dist;
                   const double gains[4] = {g, g * u.y(), g * u.z(), g * u.x()};
                   const double delay = dist / room.speed_of_sound * fs;
                   const std::size_t need =
                       static_cast<std::size_t>(delay) + kernel.taps() + 2;
                   if (need > ch[0].size())
                     for (int c = 0; c < 4; ++c) ch[c].resize(need + 256, 0.0);
                   used = std::max(used, need);
                   kernel.accumulate_foa(ch, delay, gains);
                 });
  return used;
}

}  // namespace

AudioClip render_rir(const std::vector<FoaTap>& taps, int sample_rate,
                     double length_s, int sinc_taps) {
  const FracDelayKernel kernel(sinc_taps);
  const std::size_t len =
      static_cast<std::size_t>(std::ceil(length_s * sample_rate)) + sinc_taps + 2;
  AudioClip rir(sample_rate, 4, len);
  for (const FoaTap& tap : taps) {
    const double delay = tap.delay_s * sample_rate;
    if (static_cast<std::size_t>(delay) + sinc_taps + 2 > len) continue;
    const double gains[4] = {tap.gain, tap.gain * tap.direction.y(),
                             tap.gain * tap.direction.z(),
                             tap.gain * tap.direction.x()};
    kernel.accumulate_foa(rir.channels.data(), delay, gains);
  }
  return rir;
}

AudioClip render_moving(const std::vector<double>& source,
                        const Trajectory& trajectory, const RoomSpec& room,
                        const RenderOptions& opts) {
  room.validate();
  if (source.empty()) throw std::invalid_argument("render_moving: empty source");
  const std::size_t n = source.size();
  const int hop = opts.hop;
  const std::size_t last_hop = (n - 1) / hop + 1;
  if (trajectory.samples.size() < last_hop)
    throw std::invalid_argument("render_moving: trajectory shorter than the signal");

  const ImageSetLimit limit = opts.effective_limit(room);
  const FracDelayKernel kernel(opts.sinc_taps);

  std::vector<double> rir[4];
  std::size_t max_rir = 0;
  std::vector<double> seg(2 * hop);
  std::unique_ptr<RealFft> fft;
  std::vector<std::complex<double>> seg_spec, rir_spec;
  std::vector<double> conv;

  AudioClip out(opts.sample_rate, 4, 0);

  for (std::size_t h = 0; h <= last_hop; ++h) {
    // Triangular crossfade window centered on hop h.
    const std::ptrdiff_t seg_start = static_cast<std::ptrdiff_t>(h) * hop - hop;
    bool any = false;
    for (int j = 0; j < 2 * hop; ++j) {
      const std::ptrdiff_t s = seg_start + j;
      double v = 0.0;
      if (s >= 0 && s < static_cast<std::ptrdiff_t>(n)) {
        const double w = 1.0 - std::abs(j - hop) / static_cast<double>(hop);
        v = w * source[s];
        if (v != 0.0) any = true;
      }
      seg[j] = v;
    }

    // Hold the last trajectory sample over the trailing partial hop.
    const TrajectorySample& ts =
        trajectory.samples[std::min(h, trajectory.samples.size() - 1)];
    const Eigen::Vector3d src_pos =
        room.array_position +
        ts.range_m * SphericalDirection::checked(ts.azimuth, ts.elevation).unit();
    check_inside(room, src_pos, "render_moving: source");
    if (!any) continue;  // silent segment contributes nothing

    for (int c = 0; c < 4; ++c) {
      if (rir[c].size() < max_rir) rir[c].resize(max_rir, 0.0);
      std::fill(rir[c].begin(), rir[c].begin() + max_rir, 0.0);
    }
    const std::size_t rir_used = build_foa_rir(room, src_pos, limit,
                                               opts.sample_rate, kernel, rir);
    max_rir = std::max(max_rir, rir_used);

    const std::size_t out_need = static_cast<std::size_t>(
        std::max<std::ptrdiff_t>(0, seg_start) + 2 * hop + rir_used);
    if (out.sample_count() < out_need)
      for (auto& ch : out.channels) ch.resize(out_need, 0.0);

    // FFT overlap-add of the windowed segment with this hop's RIR.
    const std::size_t conv_len = 2 * hop + rir_used - 1;
    std::size_t fft_size = 2;
    while (fft_size < conv_len) fft_size *= 2;
    if (!fft || static_cast<std::size_t>(fft->size()) != fft_size) {
      fft = std::make_unique<RealFft>(static_cast<int>(fft_size));
      seg_spec.resize(fft->bins());
      rir_spec.resize(fft->bins());
      conv.resize(fft_size);
    }
    std::vector<double> padded(fft_size, 0.0);
    std::copy(seg.begin(), seg.end(), padded.begin());
    fft->forward(padded.data(), seg_spec.data());

    for (int c = 0; c < 4; ++c) {
      std::fill(padded.begin(), padded.end(), 0.0);
      std::copy(rir[c].begin(), rir[c].begin() + rir_used, padded.begin());
      fft->forward(padded.data(), rir_spec.data());
      for (int k = 0; k < fft->bins(); ++k) rir_spec[k] *= seg_spec[k];
      fft->inverse(rir_spec.data(), conv.data());

      std::vector<double>& dst = out.channels[c];
      const std::ptrdiff_t base = seg_start;
      for (std::size_t j = 0; j < conv_len; ++j) {
        const std::ptrdiff_t idx = base + static_cast<std::ptrdiff_t>(j);
        if (idx >= 0) dst[idx] += conv[j];
      }
    }
  }

  if (out.sample_count() == 0) out = AudioClip(opts.sample_rate, 4, n);
  return out;
}

void SceneManifest::validate(double min_separation_deg) const {
  room.validate();
  if (sources.empty()) throw std::invalid_argument("SceneManifest: no sources");
  if (target_index < 0 || target_index >= static_cast<int>(sources.size()))
    throw std::invalid_argument("SceneManifest: target_index out of range");
  for (const SceneSource& s : sources) {
    if (s.trajectory.samples.empty())
      throw std::invalid_argument("SceneManifest: empty trajectory");
    for (const TrajectorySample& ts : s.trajectory.samples)
      if (ts.range_m < 1.0 || ts.range_m > 3.0)
        throw std::invalid_argument("SceneManifest: range outside [1, 3] m");
  }
  for (std::size_t i = 0; i < sources.size(); ++i) {
    for (std::size_t j = i + 1; j < sources.size(); ++j) {
      const double sep = rad_to_deg(angular_distance(
          sources[i].trajectory.direction(0), sources[j].trajectory.direction(0)));
      if (sep < min_separation_deg)
        throw std::invalid_argument(
            "SceneManifest: start separation below minimum");
    }
  }
}

void write_scene_manifest(const std::filesystem::path& json_path,
                          const SceneManifest& manifest) {
  const std::filesystem::path dir = json_path.parent_path();
  json j;
  j["schema"] = 1;
  j["seed"] = manifest.seed;
  j["target_index"] = manifest.target_index;
  j["room"] = {
      {"dimensions", {manifest.room.dimensions.x(), manifest.room.dimensions.y(),
                      manifest.room.dimensions.z()}},
      {"rt60", manifest.room.rt60},
      {"array_position",
       {manifest.room.array_position.x(), manifest.room.array_position.y(),
        manifest.room.array_position.z()}},
      {"speed_of_sound", manifest.room.speed_of_sound},
  };
  json sources = json::array();
  for (std::size_t i = 0; i < manifest.sources.size(); ++i) {
    const std::string traj_name = "traj_src" + std::to_string(i) + ".csv";
    write_trajectory_csv(dir / traj_name, manifest.sources[i].trajectory);
    sources.push_back({{"wav", manifest.sources[i].wav_path},
                       {"trajectory_csv", traj_name}});
  }
  j["sources"] = sources;

  std::ofstream f(json_path);
  if (!f) throw std::runtime_error("write_scene_manifest: cannot open " +
                                   json_path.string());
  f << j.dump(2) << "\n";
}

SceneManifest read_scene_manifest(const std::filesystem::path& json_path) {
  std::ifstream f(json_path);
  if (!f) throw std::runtime_error("read_scene_manifest: cannot open " +
                                   json_path.string());
  json j = json::parse(f);
  if (j.value("schema", 0) != 1)
    throw std::runtime_error("read_scene_manifest: unsupported schema in " +
                             json_path.string());
  SceneManifest m;
  m.seed = j.at("seed").get<std::uint64_t>();
  m.target_index = j.at("target_index").get<int>();
  const json& room = j.at("room");
  for (int i = 0; i < 3; ++i) m.room.dimensions[i] = room.at("dimensions").at(i);
  m.room.rt60 = room.at("rt60");
  for (int i = 0; i < 3; ++i)
    m.room.array_position[i] = room.at("array_position").at(i);
  m.room.speed_of_sound = room.at("speed_of_sound");
  const std::filesystem::path dir = json_path.parent_path();
  for (const json& s : j.at("sources")) {
    SceneSource src;
    src.wav_path = s.at("wav").get<std::string>();
    src.trajectory = read_trajectory_csv(dir / s.at("trajectory_csv").get<std::string>());
    m.sources.push_back(std::move(src));
  }
  return m;
}

SceneOutput assemble_scene_signals(const SceneManifest& manifest,
                                   const std::vector<std::vector<double>>& sources,
                                   const RenderOptions& opts) {
  manifest.validate();
  if (sources.size() != manifest.sources.size())
    throw std::invalid_argument("assemble_scene: source count mismatch");

  SceneOutput out;
  std::size_t mix_len = 0;
  std::vector<AudioClip> renders;
  renders.reserve(sources.size());
  for (std::size_t i = 0; i < sources.size(); ++i) {
    renders.push_back(render_moving(sources[i], manifest.sources[i].trajectory,
                                    manifest.room, opts));
    mix_len = std::max(mix_len, renders.back().sample_count());
  }

  out.mixture = AudioClip(opts.sample_rate, 4, mix_len);
  for (const AudioClip& r : renders)
    for (int c = 0; c < 4; ++c)
      for (std::size_t s = 0; s < r.sample_count(); ++s)
        out.mixture.channels[c][s] += r.channels[c][s];

  RenderOptions direct = opts;
  direct.limit = ImageSetLimit::by_order(0);
  const AudioClip target_direct =
      render_moving(sources[manifest.target_index],
                    manifest.sources[manifest.target_index].trajectory,
                    manifest.room, direct);
  out.anechoic_target = AudioClip(opts.sample_rate, 1, target_direct.sample_count());
  out.anechoic_target.channels[0] = target_direct.channels[0];  // monopole (W)
  return out;
}

SceneOutput assemble_scene(const SceneManifest& manifest,
                           const std::filesystem::path& base_dir,
                           const RenderOptions& opts) {
  std::vector<std::vector<double>> sources;
  sources.reserve(manifest.sources.size());
  for (const SceneSource& s : manifest.sources) {
    AudioClip clip = read_wav(base_dir / s.wav_path);
    if (clip.sample_rate != opts.sample_rate)
      throw std::runtime_error("assemble_scene: sample-rate mismatch in " + s.wav_path);
    if (clip.channel_count() != 1)
      throw std::runtime_error("assemble_scene: source must be mono: " + s.wav_path);
    sources.push_back(std::move(clip.channels[0]));
  }
  return assemble_scene_signals(manifest, sources, opts);
}

}  // namespace ambisteer
