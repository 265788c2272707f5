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

#include "support/oracles.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

namespace ambisteer::oracle {

double legendre_series(int n, int m, double x) {
  // Legendre coefficient arrays via (k+1) P_{k+1} = (2k+1) x P_k - k P_{k-1}.
  std::vector<double> p0{1.0}, p1{0.0, 1.0};
  if (n == 0) p1 = p0;
  for (int k = 1; k < n; ++k) {
    std::vector<double> p2(k + 2, 0.0);
    for (int i = 0; i <= k; ++i) p2[i + 1] += (2.0 * k + 1.0) * p1[i];
    for (std::size_t i = 0; i < p0.size(); ++i) p2[i] -= k * p0[i];
    for (auto& c : p2) c /= (k + 1.0);
    p0 = p1;
    p1 = p2;
  }
  std::vector<double> coeff = (n == 0) ? p0 : p1;
  for (int d = 0; d < m; ++d) {
    std::vector<double> der(std::max<std::size_t>(1, coeff.size() - 1), 0.0);
    for (std::size_t i = 1; i < coeff.size(); ++i) der[i - 1] = i * coeff[i];
    coeff = der;
  }
  double v = 0.0;
  for (std::size_t i = coeff.size(); i-- > 0;) v = v * x + coeff[i];
  return v * std::pow(1.0 - x * x, m / 2.0);
}

Eigen::MatrixXcd wigner_d_exponential(int n, double beta) {
  const int dim = 2 * n + 1;
  Eigen::MatrixXcd jplus = Eigen::MatrixXcd::Zero(dim, dim);
  for (int m = -n; m < n; ++m)
    jplus(m + 1 + n, m + n) = std::sqrt(double(n * (n + 1) - m * (m + 1)));
  const Eigen::MatrixXcd jy =
      (jplus - jplus.adjoint()) / std::complex<double>(0.0, 2.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(jy);
  Eigen::VectorXcd phases(dim);
  for (int i = 0; i < dim; ++i)
    phases(i) = std::exp(std::complex<double>(0.0, -beta * es.eigenvalues()(i)));
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

Eigen::MatrixXd ls_rotation(ShOrder order, const Eigen::Matrix3d& r3,
                            int num_dirs, Rng& rng) {
  const int c = order.channel_count();
  Eigen::MatrixXd a(num_dirs, c), b(num_dirs, c);
  for (int i = 0; i < num_dirs; ++i) {
    const SphericalDirection u = random_direction(rng);
    const SphericalDirection v = SphericalDirection::from_unit(r3 * u.unit());
    const std::vector<double> ya = sh_eval(u, order, Normalization::AmbiX);
    const std::vector<double> yb = sh_eval(v, order, Normalization::AmbiX);
    for (int k = 0; k < c; ++k) {
      a(i, k) = ya[k];
      b(i, k) = yb[k];
    }
  }
  // b = a X^T  =>  X^T = (a^T a)^{-1} a^T b
  const Eigen::MatrixXd xt =
      (a.transpose() * a).ldlt().solve(a.transpose() * b);
  return xt.transpose();
}

double schroeder_rt60(const std::vector<double>& h, int sample_rate) {
  std::vector<double> edc(h.size());
  double acc = 0.0;
  for (std::size_t i = h.size(); i-- > 0;) {
    acc += h[i] * h[i];
    edc[i] = acc;
  }
  if (acc <= 0.0) throw std::invalid_argument("schroeder_rt60: silent response");
  const double full = 10.0 * std::log10(edc[0]);

  // Linear fit of the decay curve between -5 and -25 dB.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  long count = 0;
  for (std::size_t i = 0; i < edc.size(); ++i) {
    if (edc[i] <= 0.0) break;
    const double db = 10.0 * std::log10(edc[i]) - full;
    if (db > -5.0) continue;
    if (db < -25.0) break;
    const double t = static_cast<double>(i) / sample_rate;
    sx += t;
    sy += db;
    sxx += t * t;
    sxy += t * db;
    ++count;
  }
  if (count < 10) throw std::invalid_argument("schroeder_rt60: decay too short");
  const double slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
  return -60.0 / slope;
}

double sinc_interp(const std::vector<double>& x, double t, int taps) {
  const int half = taps / 2;
  const int base = static_cast<int>(std::floor(t));
  double acc = 0.0;
  for (int j = -half + 1; j <= half; ++j) {
    const int idx = base + j;
    if (idx < 0 || idx >= static_cast<int>(x.size())) continue;
    const double d = idx - t;
    const double s = (d == 0.0) ? 1.0 : std::sin(kPi * d) / (kPi * d);
    const double w = 0.5 * (1.0 + std::cos(kPi * d / half));
    acc += x[idx] * s * (std::abs(d) <= half ? w : 0.0);
  }
  return acc;
}

double quaternion_angle_deg(const SphericalDirection& a, const SphericalDirection& b) {
  const Eigen::Vector3d ua = a.unit(), ub = b.unit();
  // Minimal rotation quaternion taking ua to ub: (1 + ua.ub, ua x ub).
  const double w = 1.0 + ua.dot(ub);
  const Eigen::Vector3d v = ua.cross(ub);
  const double norm = std::sqrt(w * w + v.squaredNorm());
  if (norm == 0.0) return 180.0;  // antipodal
  const double half = std::acos(std::min(1.0, std::max(-1.0, w / norm)));
  return rad_to_deg(2.0 * half);
}

SphericalDirection random_direction(Rng& rng) {
  // Uniform over the sphere.
  const double z = rng.uniform(-1.0, 1.0);
  const double az = rng.uniform(-kPi, kPi);
  return SphericalDirection::checked(az, std::asin(z));
}

EulerZYZ random_euler(Rng& rng) {
  return {rng.uniform(-kPi, kPi), rng.uniform(0.0, kPi), rng.uniform(-kPi, kPi)};
}

}  // namespace ambisteer::oracle
