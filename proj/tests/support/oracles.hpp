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
//
// Test-only reference implementations, kept independent of the library code
// paths they check.

#pragma once

#include <Eigen/Core>
#include <complex>
#include <vector>

#include "ambisteer/rotation.hpp"
#include "ambisteer/sh.hpp"
#include "ambisteer/types.hpp"

namespace ambisteer::oracle {

/// Associated Legendre P_n^m (no Condon-Shortley) by explicit polynomial
/// series: differentiate the Legendre coefficient array m times and evaluate
/// with Horner.
double legendre_series(int n, int m, double x);

/// Wigner little-d via dense eigendecomposition of the angular-momentum
/// generator: d^n(beta) = exp(-i beta Jy).
Eigen::MatrixXcd wigner_d_exponential(int n, double beta);

/// Least-squares estimate of the real-basis rotation from sampled
/// directions: fits X in sh(R3 u) = X sh(u) over `num_dirs` random draws.
Eigen::MatrixXd ls_rotation(ShOrder order, const Eigen::Matrix3d& r3,
                            int num_dirs, Rng& rng);

/// RT60 from Schroeder backward integration of an impulse response, fitted
/// on the -5 to -25 dB span.
double schroeder_rt60(const std::vector<double>& h, int sample_rate);

/// Windowed-sinc interpolation of x at fractional position t (samples).
double sinc_interp(const std::vector<double>& x, double t, int taps = 64);

/// Great-circle angle between directions via quaternion composition.
double quaternion_angle_deg(const SphericalDirection& a, const SphericalDirection& b);

SphericalDirection random_direction(Rng& rng);
EulerZYZ random_euler(Rng& rng);

}  // namespace ambisteer::oracle
