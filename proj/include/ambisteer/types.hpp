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

#include <Eigen/Core>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>

namespace ambisteer {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

/// Wraps an angle into (-pi, pi].
inline double wrap_angle(double a) {
  double r = std::fmod(a, kTwoPi);
  if (r <= -kPi) r += kTwoPi;
  if (r > kPi) r -= kTwoPi;
  return r;
}

/// Direction on the unit sphere. Azimuth increases counter-clockwise from +x
/// toward +y, elevation from the horizontal plane toward +z.
struct SphericalDirection {
  double azimuth = 0.0;    // radians, (-pi, pi]
  double elevation = 0.0;  // radians, [-pi/2, pi/2]

  /// Wraps the azimuth and rejects out-of-range elevation. Elevation is never
  /// silently clamped.
  static SphericalDirection checked(double azimuth, double elevation) {
    if (!std::isfinite(azimuth) || !std::isfinite(elevation))
      throw std::domain_error("SphericalDirection: non-finite angle");
    if (elevation < -kPi / 2 || elevation > kPi / 2)
      throw std::domain_error("SphericalDirection: elevation outside [-pi/2, pi/2]");
    return {wrap_angle(azimuth), elevation};
  }

  Eigen::Vector3d unit() const {
    const double ce = std::cos(elevation);
    return {ce * std::cos(azimuth), ce * std::sin(azimuth), std::sin(elevation)};
  }

  static SphericalDirection from_unit(const Eigen::Vector3d& u) {
    return {std::atan2(u.y(), u.x()),
            std::atan2(u.z(), std::hypot(u.x(), u.y()))};
  }
};

/// Great-circle angle between two directions, radians in [0, pi].
inline double angular_distance(const SphericalDirection& a, const SphericalDirection& b) {
  const Eigen::Vector3d ua = a.unit(), ub = b.unit();
  return std::atan2(ua.cross(ub).norm(), ua.dot(ub));
}

/// Deterministic random stream. All randomness in the library flows through
/// this class so that a base seed reproduces every draw bit-exactly.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

  std::uint64_t next_u64() {
    // xorshift* with a splitmix-style increment; period 2^64.
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1).
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1p-53; }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

  /// Standard normal deviate (Box-Muller, one value per call).
  double normal() {
    double u1 = uniform01(), u2 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
  }

  /// Derives an independent substream; forking with distinct tags yields
  /// decorrelated, reproducible streams.
  Rng fork(std::uint64_t tag) const {
    Rng r(state_ ^ (0xd1342543de82ef95ull * (tag + 1)));
    r.next_u64();
    return r;
  }

 private:
  std::uint64_t state_;
};

}  // namespace ambisteer
