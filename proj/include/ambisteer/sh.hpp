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
#include <vector>

#include "ambisteer/types.hpp"

namespace ambisteer {

/// Truncation order of a spherical-harmonic expansion. Order N spans
/// (N+1)^2 channels in ACN ordering.
struct ShOrder {
  int order = 1;

  int channel_count() const { return (order + 1) * (order + 1); }
};

inline constexpr int kMaxShOrder = 8;

/// ACN channel index for degree n, mode m (-n <= m <= n).
inline int acn_index(int n, int m) { return n * n + n + m; }

enum class Normalization {
  AmbiX,        // SN3D-scaled real harmonics; channel 0 is identically 1
  Orthonormal,  // unit L2 norm under the surface integral on the sphere
};

/// Associated Legendre function P_n^m(x) without the Condon-Shortley phase,
/// evaluated by upward recursion in n. Requires 0 <= m <= n and |x| <= 1.
double assoc_legendre(int n, int m, double x);

/// Evaluates the real spherical-harmonic basis at a direction, ACN-ordered.
std::vector<double> sh_eval(const SphericalDirection& dir, ShOrder order,
                            Normalization norm = Normalization::AmbiX);

/// First-order ambiX evaluation straight from a unit vector; out is
/// {W, Y, Z, X}. Hot path for the scene renderer.
inline void sh_eval_foa_unit(const Eigen::Vector3d& u, double out[4]) {
  out[0] = 1.0;
  out[1] = u.y();
  out[2] = u.z();
  out[3] = u.x();
}

/// Product quadrature on the sphere: Gauss-Legendre in sin(elevation) times
/// an equispaced azimuth rule. Exact for spherical polynomials up to
/// `exact_degree`, weights summing to 4*pi.
struct SphereQuadrature {
  struct Node {
    SphericalDirection dir;
    double weight;
  };
  std::vector<Node> nodes;
  int exact_degree = 0;

  /// Rule with `elevation_nodes` Gauss points and `azimuth_steps` azimuths.
  static SphereQuadrature product_rule(int elevation_nodes, int azimuth_steps);

  /// Smallest product rule exact to degree 2N (Gram matrices of order N).
  static SphereQuadrature for_order(int order) {
    return product_rule(order + 1, 2 * order + 2);
  }
};

/// Gram matrix of the basis under the quadrature: sum_q w_q y(u_q) y(u_q)^T.
/// Diagonal for AmbiX, identity for Orthonormal. Throws if the quadrature is
/// not exact to degree 2N.
Eigen::MatrixXd sh_gram(ShOrder order, Normalization norm,
                        const SphereQuadrature& quadrature);

}  // namespace ambisteer
