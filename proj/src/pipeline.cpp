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

#include "ambisteer/pipeline.hpp"

#include <stdexcept>

namespace ambisteer {

void PipelineMode::validate() const {
  if (ar_tst && guidance != Guidance::Adaptive)
    throw std::invalid_argument(
        "PipelineMode: AR tracking requires adaptive guidance");
}

std::string PipelineMode::tag() const {
  std::string t;
  switch (guidance) {
    case Guidance::StrongOracle: t = "strong"; break;
    case Guidance::Fixed: t = "fixed"; break;
    case Guidance::Adaptive: t = "adaptive"; break;
  }
  if (ar_tst) t += "-artst";
  if (ar_ssf) t += "-arssf";
  return t;
}

PipelineResult run_pipeline(const AudioClip& mixture,
                            const SphericalDirection& init_dir,
                            const PipelineMode& mode, const Trajectory* oracle,
                            const PipelineConfig& cfg,
                            TrackerInterface* tracker_override) {
  mode.validate();
  if (mixture.channel_count() != 4)
    throw std::invalid_argument("run_pipeline: FOA (4-channel) mixture required");
  if (mode.guidance == Guidance::StrongOracle && oracle == nullptr)
    throw std::invalid_argument("run_pipeline: StrongOracle requires a trajectory");
  const SphericalDirection init =
      SphericalDirection::checked(init_dir.azimuth, init_dir.elevation);

  const ShOrder order{1};
  PipelineConfig c = cfg;
  c.tracker.ar_enabled = mode.ar_tst;
  c.ssf.ar_enabled = mode.ar_ssf;

  Stft stft(c.stft);
  const SpectrogramTensor spec = stft.analyze(mixture);
  const int frames = spec.frames, bins = spec.bins, channels = spec.channels;

  SpatialFilter ssf(c.ssf, c.stft);
  IntensityTracker default_tracker(c.tracker, c.stft, init);
  TrackerInterface* tracker =
      tracker_override ? tracker_override : &default_tracker;

  PipelineResult result;
  result.enhanced_spec = SpectrogramTensor::zeros(c.stft, frames, 1);
  result.estimated.hop_seconds = c.stft.hop_seconds();
  result.estimated.samples.resize(frames);
  result.log.resize(frames);

  SphericalDirection current = init;
  if (mode.guidance == Guidance::StrongOracle) current = oracle->direction(0);
  RealRotation steering = steering_matrix(current, order);

  std::vector<std::complex<double>> frame_buf(
      static_cast<std::size_t>(bins) * channels);
  std::vector<std::complex<double>> bootstrap(bins);

  for (int t = 0; t < frames; ++t) {
    // (1) Align with the previous frame's steering estimate (one-frame lag;
    // at t = 0 the initial direction is the estimate).
    std::copy(spec.frame(t), spec.frame(t) + frame_buf.size(), frame_buf.begin());
    steer_frame_inplace(frame_buf.data(), bins, channels, steering, true);
    result.log[t].pre_track_steering = steering_euler(current);

    SphericalDirection next = current;
    double range = 1.0;
    switch (mode.guidance) {
      case Guidance::Fixed:
        break;
      case Guidance::StrongOracle: {
        const std::size_t i =
            std::min<std::size_t>(t, oracle->samples.size() - 1);
        next = oracle->direction(i);
        range = oracle->samples[i].range_m;
        break;
      }
      case Guidance::Adaptive: {
        const std::complex<double>* prev_enh = nullptr;
        if (mode.ar_tst) {
          if (t == 0) {
            // No feedback yet: bootstrap with the beamformed current frame.
            ssf.beamform(frame_buf.data(), bins, channels, bootstrap.data());
            prev_enh = bootstrap.data();
          } else {
            prev_enh = ssf.previous_enhanced().data();
          }
        }
        const Deviation dev =
            tracker->step(frame_buf.data(), bins, channels, prev_enh);
        next = SphericalDirection::checked(init.azimuth + dev.azimuth,
                                           init.elevation + dev.elevation);
        break;
      }
    }

    // (2) Incremental correction: the frame is already steered by the old
    // estimate, so only D_new^T * D_old remains to be applied.
    if (mode.guidance != Guidance::Fixed) {
      const RealRotation next_steering = steering_matrix(next, order);
      const RealRotation correction = next_steering.transposed() * steering;
      steer_frame_inplace(frame_buf.data(), bins, channels, correction, false);
      steering = next_steering;
      current = next;
    }

    // (3) Enhance and feed back.
    ssf.enhance_step(frame_buf.data(), bins, channels,
                     result.enhanced_spec.frame(t));

    result.estimated.samples[t] = {current.azimuth, current.elevation, range};
    result.log[t].estimate = current;
  }

  result.enhanced = stft.synthesize(result.enhanced_spec);
  return result;
}

Trajectory steering_trace(const PipelineResult& result) {
  return result.estimated;
}

}  // namespace ambisteer
