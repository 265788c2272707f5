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

#include "ambisteer/experiment.hpp"

#include <json.hpp>

#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

namespace ambisteer {

using nlohmann::json;
namespace fs = std::filesystem;

std::uint64_t config_hash(const std::string& canonical) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : canonical) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

// ---------------------------------------------------------------------------
// Speech-shaped source synthesis

std::vector<double> synth_speechlike(Rng& rng, double seconds, int sample_rate) {
  const std::size_t n = static_cast<std::size_t>(seconds * sample_rate);
  std::vector<double> x(n, 0.0);

  const double f0_base = rng.uniform(90.0, 230.0);
  const double vibrato_hz = rng.uniform(0.7, 1.4);
  const double vibrato_depth = rng.uniform(0.02, 0.08);
  double formants[3] = {rng.uniform(300.0, 800.0), rng.uniform(900.0, 1800.0),
                        rng.uniform(2100.0, 3000.0)};
  const double widths[3] = {110.0, 150.0, 220.0};
  const double formant_drift_hz = rng.uniform(0.1, 0.3);
  const double formant_drift_phase = rng.uniform(0.0, kTwoPi);

  auto envelope = [&](double f, double t) {
    double e = 0.0;
    const double drift = 1.0 + 0.15 * std::sin(kTwoPi * formant_drift_hz * t +
                                               formant_drift_phase);
    for (int i = 0; i < 3; ++i) {
      const double d = (f - formants[i] * drift) / widths[i];
      e += 1.0 / (1.0 + d * d);
    }
    return e / (1.0 + std::pow(f / 3800.0, 8.0));  // band edge roll-off
  };

  constexpr int kHarmonics = 48;
  std::vector<double> phase(kHarmonics);
  for (auto& p : phase) p = rng.uniform(0.0, kTwoPi);

  std::size_t pos = 0;
  while (pos < n) {
    const double draw = rng.uniform01();
    // voiced run / noise burst / pause
    double seg_s;
    int kind;
    if (draw < 0.68) {
      kind = 0;
      seg_s = rng.uniform(0.12, 0.4);
    } else if (draw < 0.84) {
      kind = 1;
      seg_s = rng.uniform(0.04, 0.12);
    } else {
      kind = 2;
      seg_s = rng.uniform(0.06, 0.3);
    }
    const std::size_t seg = std::min<std::size_t>(
        n - pos, static_cast<std::size_t>(seg_s * sample_rate));
    const std::size_t ramp = std::min<std::size_t>(seg / 4, sample_rate / 50);

    if (kind == 0) {
      const double level = rng.uniform(0.5, 1.0);
      for (std::size_t i = 0; i < seg; ++i) {
        const double t = static_cast<double>(pos + i) / sample_rate;
        const double f0 =
            f0_base * (1.0 + vibrato_depth * std::sin(kTwoPi * vibrato_hz * t));
        double s = 0.0;
        for (int h = 1; h <= kHarmonics; ++h) {
          const double fh = h * f0;
          if (fh > 4500.0) break;
          phase[h - 1] += kTwoPi * fh / sample_rate;
          s += envelope(fh, t) / std::sqrt(static_cast<double>(h)) *
               std::sin(phase[h - 1]);
        }
        double w = 1.0;
        if (i < ramp) w = 0.5 - 0.5 * std::cos(kPi * i / ramp);
        if (seg - i <= ramp) w = 0.5 - 0.5 * std::cos(kPi * (seg - i) / ramp);
        x[pos + i] = level * w * s;
      }
    } else if (kind == 1) {
      const double level = rng.uniform(0.1, 0.3);
      double prev = 0.0;
      for (std::size_t i = 0; i < seg; ++i) {
        const double white = rng.normal();
        const double hp = white - 0.7 * prev;  // tilt toward high band
        prev = white;
        double w = 1.0;
        if (i < ramp) w = 0.5 - 0.5 * std::cos(kPi * i / ramp);
        if (seg - i <= ramp) w = 0.5 - 0.5 * std::cos(kPi * (seg - i) / ramp);
        x[pos + i] = level * w * hp;
      }
    }
    pos += seg;
  }

  double rms = 0.0;
  for (double v : x) rms += v * v;
  rms = std::sqrt(rms / n);
  if (rms > 0.0)
    for (double& v : x) v *= 0.12 / rms;
  return x;
}

// ---------------------------------------------------------------------------
// Dataset configuration

void DatasetConfig::validate() const {
  if (scene_count <= 0) throw ConfigError("config: scene_count must be positive");
  if (duration_s <= 0.5) throw ConfigError("config: duration too short");
  if (num_sources < 1) throw ConfigError("config: at least one source");
  if (sample_rate <= 0) throw ConfigError("config: bad sample rate");
  if ((room_max - room_min).minCoeff() < 0.0)
    throw ConfigError("config: room bounds inverted");
  if (rt60_min > rt60_max || rt60_min < 0.0)
    throw ConfigError("config: rt60 bounds inverted");
  if (!allow_rt60_outside && (rt60_min < 0.2 || rt60_max > 0.5) &&
      !(rt60_min == 0.0 && rt60_max == 0.0))
    throw ConfigError(
        "config: rt60 outside the 0.2-0.5 s dataset range "
        "(pass allow_rt60_outside to override)");
  if (min_start_separation_deg < 0.0 || min_start_separation_deg > 180.0)
    throw ConfigError("config: bad start separation");
}

namespace {

json sinusoid_bounds_json(const SinusoidBounds& b, bool angles_deg) {
  const double s = angles_deg ? 180.0 / kPi : 1.0;
  return {{"offset", {b.offset_min * s, b.offset_max * s}},
          {"amplitude", {b.amplitude_min * s, b.amplitude_max * s}},
          {"frequency_hz", {b.frequency_min_hz, b.frequency_max_hz}}};
}

SinusoidBounds sinusoid_bounds_from_json(const json& j, const SinusoidBounds& dflt,
                                         bool angles_deg) {
  SinusoidBounds b = dflt;
  const double s = angles_deg ? kPi / 180.0 : 1.0;
  if (j.contains("offset")) {
    b.offset_min = j["offset"].at(0).get<double>() * s;
    b.offset_max = j["offset"].at(1).get<double>() * s;
  }
  if (j.contains("amplitude")) {
    b.amplitude_min = j["amplitude"].at(0).get<double>() * s;
    b.amplitude_max = j["amplitude"].at(1).get<double>() * s;
  }
  if (j.contains("frequency_hz")) {
    b.frequency_min_hz = j["frequency_hz"].at(0).get<double>();
    b.frequency_max_hz = j["frequency_hz"].at(1).get<double>();
  }
  return b;
}

}  // namespace

std::string DatasetConfig::canonical_json() const {
  json j;
  j["scene_count"] = scene_count;
  j["seed"] = seed;
  j["duration_s"] = duration_s;
  j["num_sources"] = num_sources;
  j["sample_rate"] = sample_rate;
  j["room_min"] = {room_min.x(), room_min.y(), room_min.z()};
  j["room_max"] = {room_max.x(), room_max.y(), room_max.z()};
  j["rt60"] = {rt60_min, rt60_max};
  j["allow_rt60_outside"] = allow_rt60_outside;
  j["min_start_separation_deg"] = min_start_separation_deg;
  j["trajectory"] = {{"azimuth", sinusoid_bounds_json(trajectory.azimuth, true)},
                     {"elevation", sinusoid_bounds_json(trajectory.elevation, true)},
                     {"range", sinusoid_bounds_json(trajectory.range, false)}};
  j["source_wavs"] = source_wavs;
  return j.dump();
}

DatasetConfig DatasetConfig::from_json_file(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("config: cannot open " + path.string());
  json j;
  try {
    j = json::parse(f);
  } catch (const std::exception& e) {
    throw ConfigError("config: parse error in " + path.string() + ": " + e.what());
  }
  DatasetConfig cfg;
  cfg.scene_count = j.value("scene_count", cfg.scene_count);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.duration_s = j.value("duration_s", cfg.duration_s);
  cfg.num_sources = j.value("num_sources", cfg.num_sources);
  cfg.sample_rate = j.value("sample_rate", cfg.sample_rate);
  if (j.contains("room_min"))
    for (int i = 0; i < 3; ++i) cfg.room_min[i] = j["room_min"].at(i);
  if (j.contains("room_max"))
    for (int i = 0; i < 3; ++i) cfg.room_max[i] = j["room_max"].at(i);
  if (j.contains("rt60")) {
    cfg.rt60_min = j["rt60"].at(0);
    cfg.rt60_max = j["rt60"].at(1);
  }
  cfg.allow_rt60_outside = j.value("allow_rt60_outside", false);
  cfg.min_start_separation_deg =
      j.value("min_start_separation_deg", cfg.min_start_separation_deg);
  if (j.contains("trajectory")) {
    const json& t = j["trajectory"];
    if (t.contains("azimuth"))
      cfg.trajectory.azimuth =
          sinusoid_bounds_from_json(t["azimuth"], cfg.trajectory.azimuth, true);
    if (t.contains("elevation"))
      cfg.trajectory.elevation =
          sinusoid_bounds_from_json(t["elevation"], cfg.trajectory.elevation, true);
    if (t.contains("range"))
      cfg.trajectory.range =
          sinusoid_bounds_from_json(t["range"], cfg.trajectory.range, false);
  }
  if (j.contains("source_wavs"))
    cfg.source_wavs = j["source_wavs"].get<std::vector<std::string>>();
  cfg.validate();
  return cfg;
}

// ---------------------------------------------------------------------------
// Scene generation

namespace {

bool trajectory_inside_room(const Trajectory& traj, const RoomSpec& room,
                            double margin) {
  for (const TrajectorySample& s : traj.samples) {
    const Eigen::Vector3d p =
        room.array_position +
        s.range_m * SphericalDirection{wrap_angle(s.azimuth), s.elevation}.unit();
    for (int i = 0; i < 3; ++i)
      if (p[i] < margin || p[i] > room.dimensions[i] - margin) return false;
  }
  return true;
}

void run_parallel(int count, int jobs, const std::function<void(int)>& work) {
  jobs = std::max(1, jobs);
  if (jobs == 1) {
    for (int i = 0; i < count; ++i) work(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (int t = 0; t < jobs; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= count) return;
        try {
          work(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace

GeneratedScene generate_scene(const DatasetConfig& cfg, int scene_index) {
  cfg.validate();
  const std::uint64_t scene_seed = Rng(cfg.seed).fork(scene_index).next_u64();
  Rng rng(scene_seed);

  GeneratedScene out;
  SceneManifest& m = out.manifest;
  m.seed = scene_seed;
  m.target_index = 0;

  for (int i = 0; i < 3; ++i)
    m.room.dimensions[i] = rng.uniform(cfg.room_min[i], cfg.room_max[i]);
  m.room.rt60 = rng.uniform(cfg.rt60_min, cfg.rt60_max);
  m.room.array_position.x() =
      m.room.dimensions.x() / 2 + rng.uniform(-0.3, 0.3);
  m.room.array_position.y() =
      m.room.dimensions.y() / 2 + rng.uniform(-0.3, 0.3);
  m.room.array_position.z() =
      std::min(rng.uniform(1.2, 1.8), m.room.dimensions.z() - 0.8);
  m.room.validate();

  const double hop_s =
      static_cast<double>(StftConfig::for_sample_rate(cfg.sample_rate).hop) /
      cfg.sample_rate;
  constexpr int kMaxSceneRetries = 500;
  for (int s = 0; s < cfg.num_sources; ++s) {
    bool placed = false;
    for (int attempt = 0; attempt < kMaxSceneRetries && !placed; ++attempt) {
      const std::uint64_t traj_seed = rng.next_u64();
      Trajectory traj;
      try {
        traj = gen_trajectory(traj_seed, cfg.duration_s, hop_s, cfg.trajectory);
      } catch (const std::exception&) {
        continue;
      }
      if (!trajectory_inside_room(traj, m.room, 0.05)) continue;
      bool separated = true;
      for (const SceneSource& prev : m.sources) {
        if (rad_to_deg(angular_distance(traj.direction(0),
                                        prev.trajectory.direction(0))) <
            cfg.min_start_separation_deg) {
          separated = false;
          break;
        }
      }
      if (!separated) continue;
      SceneSource src;
      src.wav_path = "source_" + std::to_string(s) + ".wav";
      src.trajectory = std::move(traj);
      m.sources.push_back(std::move(src));
      placed = true;
    }
    if (!placed)
      throw DataError("generate_scene: cannot satisfy constraints (scene " +
                      std::to_string(scene_index) + ", seed " +
                      std::to_string(scene_seed) + ")");
  }

  for (int s = 0; s < cfg.num_sources; ++s) {
    if (cfg.source_wavs.empty()) {
      Rng srng = rng.fork(1000 + s);
      out.sources.push_back(
          synth_speechlike(srng, cfg.duration_s, cfg.sample_rate));
    } else {
      const std::string& path =
          cfg.source_wavs[rng.below(cfg.source_wavs.size())];
      AudioClip clip = read_wav(path);
      if (clip.sample_rate != cfg.sample_rate)
        throw DataError("generate_scene: sample-rate mismatch in " + path);
      std::vector<double> sig = std::move(clip.channels.at(0));
      sig.resize(static_cast<std::size_t>(cfg.duration_s * cfg.sample_rate), 0.0);
      out.sources.push_back(std::move(sig));
    }
  }
  m.validate(cfg.min_start_separation_deg);
  return out;
}

void simulate_dataset(const DatasetConfig& cfg, const fs::path& out_dir, int jobs) {
  cfg.validate();
  fs::create_directories(out_dir / "scenes");

  json index;
  index["schema"] = 1;
  index["config_hash"] = config_hash(cfg.canonical_json());
  index["config"] = json::parse(cfg.canonical_json());
  json scene_list = json::array();
  std::vector<std::string> scene_dirs;
  for (int i = 0; i < cfg.scene_count; ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "scene_%04d", i);
    scene_dirs.push_back(std::string("scenes/") + name);
    scene_list.push_back(scene_dirs.back());
  }
  index["scenes"] = scene_list;
  {
    std::ofstream f(out_dir / "dataset.json");
    if (!f) throw DataError("simulate: cannot write " + out_dir.string());
    f << index.dump(2) << "\n";
  }

  run_parallel(cfg.scene_count, jobs, [&](int i) {
    const fs::path dir = out_dir / scene_dirs[i];
    fs::create_directories(dir);
    GeneratedScene scene = generate_scene(cfg, i);

    RenderOptions opts;
    opts.sample_rate = cfg.sample_rate;
    opts.hop = StftConfig::for_sample_rate(cfg.sample_rate).hop;
    const SceneOutput rendered =
        assemble_scene_signals(scene.manifest, scene.sources, opts);

    for (std::size_t s = 0; s < scene.sources.size(); ++s) {
      AudioClip mono(cfg.sample_rate, 1, scene.sources[s].size());
      mono.channels[0] = scene.sources[s];
      write_wav(dir / scene.manifest.sources[s].wav_path, mono);
    }
    write_scene_manifest(dir / "manifest.json", scene.manifest);
    write_wav(dir / "mixture.wav", rendered.mixture);
    write_wav(dir / "target_anechoic.wav", rendered.anechoic_target);
  });
}

// ---------------------------------------------------------------------------
// Runs

namespace {

json pipeline_config_json(const PipelineMode& mode, const PipelineConfig& cfg) {
  json j;
  j["mode"] = mode.tag();
  j["stft"] = {{"sample_rate", cfg.stft.sample_rate},
               {"window_len", cfg.stft.window_len},
               {"hop", cfg.stft.hop}};
  j["tracker"] = {{"smoothing", cfg.tracker.smoothing_constant},
                  {"gate_deg", rad_to_deg(cfg.tracker.gate_angle)},
                  {"band", {cfg.tracker.lo_bin, cfg.tracker.hi_bin}},
                  {"ar_mask_floor", cfg.tracker.ar_mask_floor}};
  j["ssf"] = {{"beamformer", cfg.ssf.beamformer == BeamformerType::MaxDi
                                 ? "maxdi"
                                 : "cardioid"},
              {"shape", cfg.ssf.cardioid_shape},
              {"postfilter", cfg.ssf.postfilter_enabled},
              {"dd_smoothing", cfg.ssf.dd_smoothing},
              {"gain_floor", cfg.ssf.gain_floor},
              {"noise_window_s", cfg.ssf.noise_window_s},
              {"noise_bias", cfg.ssf.noise_bias}};
  return j;
}

std::vector<std::string> dataset_scene_dirs(const fs::path& dataset_dir) {
  std::ifstream f(dataset_dir / "dataset.json");
  if (!f) throw DataError("dataset: missing dataset.json in " + dataset_dir.string());
  const json j = json::parse(f);
  if (j.value("schema", 0) != 1) throw DataError("dataset: unsupported schema");
  return j.at("scenes").get<std::vector<std::string>>();
}

}  // namespace

void run_dataset(const fs::path& dataset_dir, const RunOptions& options,
                 const fs::path& out_dir) {
  options.mode.validate();
  const std::vector<std::string> scenes = dataset_scene_dirs(dataset_dir);
  fs::create_directories(out_dir);

  const json cfg_json = pipeline_config_json(options.mode, options.pipeline);
  const std::uint64_t hash = config_hash(cfg_json.dump());
  {
    json run;
    run["schema"] = 1;
    run["mode"] = options.mode.tag();
    run["dataset"] = fs::absolute(dataset_dir).string();
    run["config"] = cfg_json;
    run["config_hash"] = hash;
    std::ofstream f(out_dir / "run.json");
    if (!f) throw DataError("run: cannot write " + out_dir.string());
    f << run.dump(2) << "\n";
  }

  run_parallel(static_cast<int>(scenes.size()), options.jobs, [&](int i) {
    const fs::path scene_dir = dataset_dir / scenes[i];
    const fs::path dest = out_dir / fs::path(scenes[i]).filename();
    const fs::path meta_path = dest / "meta.json";
    if (options.resume && fs::exists(meta_path)) {
      std::ifstream mf(meta_path);
      try {
        const json meta = json::parse(mf);
        if (meta.value("config_hash", 0ull) == hash) return;  // already done
      } catch (...) {
      }
    }
    fs::create_directories(dest);

    const SceneManifest manifest = read_scene_manifest(scene_dir / "manifest.json");
    const AudioClip mixture = read_wav(scene_dir / "mixture.wav");
    if (mixture.channel_count() != 4)
      throw DataError("run: mixture is not FOA in " + scene_dir.string());
    const Trajectory& target_traj =
        manifest.sources[manifest.target_index].trajectory;
    const SphericalDirection init = target_traj.direction(0);

    const auto t0 = std::chrono::steady_clock::now();
    const PipelineResult result =
        run_pipeline(mixture, init, options.mode,
                     options.mode.guidance == Guidance::StrongOracle
                         ? &target_traj
                         : nullptr,
                     options.pipeline);
    const double runtime =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();

    write_wav(dest / "enhanced.wav", result.enhanced);
    write_trajectory_csv(dest / "estimated.csv", steering_trace(result));
    json meta;
    meta["scene"] = scenes[i];
    meta["mode"] = options.mode.tag();
    meta["config_hash"] = hash;
    meta["runtime_s"] = runtime;
    meta["init_dir_deg"] = {rad_to_deg(init.azimuth), rad_to_deg(init.elevation)};
    std::ofstream f(meta_path);
    f << meta.dump(2) << "\n";
  });
}

// ---------------------------------------------------------------------------
// Evaluation

std::vector<EvalRecord> eval_runs(const std::vector<fs::path>& run_dirs,
                                  const fs::path& out_dir,
                                  const EvalOptions& options) {
  options.bins.validate();
  std::vector<EvalRecord> records;

  for (const fs::path& run_dir : run_dirs) {
    std::ifstream rf(run_dir / "run.json");
    if (!rf) throw DataError("eval: missing run.json in " + run_dir.string());
    const json run = json::parse(rf);
    const fs::path dataset_dir = run.at("dataset").get<std::string>();
    const std::string mode = run.at("mode").get<std::string>();

    for (const std::string& scene_rel : dataset_scene_dirs(dataset_dir)) {
      const fs::path scene_dir = dataset_dir / scene_rel;
      const fs::path dest = run_dir / fs::path(scene_rel).filename();
      if (!fs::exists(dest / "meta.json"))
        throw DataError("eval: incomplete run, missing " +
                        (dest / "meta.json").string());

      const SceneManifest manifest =
          read_scene_manifest(scene_dir / "manifest.json");
      const Trajectory& truth =
          manifest.sources[manifest.target_index].trajectory;
      Trajectory est = read_trajectory_csv(dest / "estimated.csv");

      // Common hop grid; the estimate has one sample per STFT frame.
      const std::size_t common = std::min(truth.size(), est.size());
      Trajectory truth_c = truth, est_c = est;
      truth_c.samples.resize(common);
      est_c.samples.resize(common);

      const AudioClip enhanced = read_wav(dest / "enhanced.wav");
      const AudioClip reference = read_wav(scene_dir / "target_anechoic.wav");
      const StftConfig stft = StftConfig::for_sample_rate(enhanced.sample_rate);
      const std::size_t lo = stft.hop;
      const std::size_t hi = std::min(
          {enhanced.sample_count(), reference.sample_count(),
           static_cast<std::size_t>(est.size()) * stft.hop});
      if (hi <= lo) throw DataError("eval: enhanced output too short in " +
                                    dest.string());
      const std::span<const double> e(enhanced.channels[0].data() + lo, hi - lo);
      const std::span<const double> r(reference.channels[0].data() + lo, hi - lo);

      std::vector<Trajectory> interferers;
      for (std::size_t s = 0; s < manifest.sources.size(); ++s)
        if (static_cast<int>(s) != manifest.target_index)
          interferers.push_back(manifest.sources[s].trajectory);

      std::ifstream mf(dest / "meta.json");
      const json meta = json::parse(mf);

      EvalRecord rec;
      rec.scene_id = fs::path(scene_rel).filename().string();
      rec.mode = mode;
      rec.mae_deg = utterance_mae_deg(est_c, truth_c);
      rec.si_sdr_db = si_sdr_db(e, r);
      rec.min_interferer_deg =
          interferers.empty() ? 180.0
                              : min_interferer_distance_deg(truth, interferers);
      rec.runtime_s = meta.value("runtime_s", 0.0);
      records.push_back(std::move(rec));
    }
  }

  std::sort(records.begin(), records.end(),
            [](const EvalRecord& a, const EvalRecord& b) {
              return std::tie(a.scene_id, a.mode) < std::tie(b.scene_id, b.mode);
            });

  fs::create_directories(out_dir);
  write_records_csv(out_dir / "records.csv", records);
  const std::vector<SummaryRow> rows = summarize(records, options.bins);
  write_summary_csv(out_dir / "summary.csv", rows);
  write_summary_markdown(out_dir / "summary.md", rows);
  return records;
}

}  // namespace ambisteer
