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
#include <complex>
#include <vector>

#include "ambisteer/sh.hpp"
#include "ambisteer/stft.hpp"
#include "ambisteer/types.hpp"

namespace ambisteer {

/// ZYZ Euler angles: a rotation by gamma about Z, then beta about Y, then
/// alpha about Z (all axes fixed, right-handed). Angles are stored unwrapped.
struct EulerZYZ {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
};

/// 3x3 direction rotation Rz(alpha) * Ry(beta) * Rz(gamma).
Eigen::Matrix3d euler_to_matrix(const EulerZYZ& e);

/// ZYZ angles of a rotation matrix; gamma is fixed to 0 at the gimbal
/// singularities (|sin beta| ~ 0).
EulerZYZ matrix_to_euler(const Eigen::Matrix3d& r);

/// Wigner little-d matrix d^n_{m m'}(beta), indexed (m+n, m'+n). Follows the
/// convention d^n(beta) = exp(-i beta Jy), so d^n(0) = I. Supports n <= 12.
Eigen::MatrixXd wigner_d_small(int n, double beta);

/// Full complex Wigner-D block: D^n_{m m'} = e^{-i m alpha} d^n_{m m'}(beta)
/// e^{-i m' gamma}. Unitary; D(0,0,0) = I.
Eigen::MatrixXcd wigner_D_complex(int n, const EulerZYZ& e);

/// Orthogonal rotation of real spherical-harmonic coefficient vectors,
/// block-diagonal over degrees in ACN ordering. For any direction u,
/// R(e) * sh_eval(u) == sh_eval(euler_to_matrix(e) * u), independent of the
/// per-degree normalization.
class RealRotation {
 public:
  RealRotation() = default;
  static RealRotation identity(ShOrder order);

  ShOrder order() const { return order_; }
  int dimension() const { return order_.channel_count(); }
  const Eigen::MatrixXd& block(int n) const { return blocks_[n]; }

  /// y = R x (or R^T x). Buffers must hold dimension() values and may not
  /// alias.
  void apply(const double* x, double* y, bool transpose = false) const;
  void apply(const std::complex<double>* x, std::complex<double>* y,
             bool transpose = false) const;

  /// Dense (N+1)^2 square matrix, zero off the diagonal blocks.
  Eigen::MatrixXd dense() const;

  RealRotation transposed() const;

  friend RealRotation operator*(const RealRotation& a, const RealRotation& b);

 private:
  friend RealRotation real_rotation(ShOrder, const EulerZYZ&);
  ShOrder order_{0};
  std::vector<Eigen::MatrixXd> blocks_;
};

/// Builds the real-basis rotation for ZYZ Euler angles via the complex
/// Wigner-D blocks and the fixed complex-to-real change of basis. Throws if
/// the conjugation leaves an imaginary residue above 1e-12.
RealRotation real_rotation(ShOrder order, const EulerZYZ& e);

/// Rotation that maps the front direction (azimuth 0, elevation 0) onto
/// `dir`; its transpose therefore re-centers a source at `dir` onto front.
RealRotation steering_matrix(const SphericalDirection& dir, ShOrder order);

/// Euler angles realizing steering_matrix(dir).
inline EulerZYZ steering_euler(const SphericalDirection& dir) {
  return {dir.azimuth, -dir.elevation, 0.0};
}

/// Applies R (or R^T when `inverse`) to every (frame, bin) channel vector.
/// Frequency-independent and energy-preserving.
SpectrogramTensor steer_signal(const SpectrogramTensor& spec,
                               const RealRotation& rotation, bool inverse);

/// In-place variant on one frame block of bins*channels values.
void steer_frame_inplace(std::complex<double>* frame, int bins, int channels,
                         const RealRotation& rotation, bool inverse);

}  // namespace ambisteer
