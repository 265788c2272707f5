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

#include "ambisteer/rotation.hpp"

#include <cmath>
#include <stdexcept>

namespace ambisteer {

namespace {

constexpr int kMaxWignerDegree = 12;
constexpr double kImagResidueTol = 1e-12;

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

// Single term of Wigner's sum formula at the boundary degree
// L = max(|m1|, |m2|); the sum collapses to one product there, which seeds
// the upward three-term recurrence in the degree.
double wigner_seed(int L, int m1, int m2, double cos_half, double sin_half) {
  const int s = std::max(0, m2 - m1);
  const double pref = std::sqrt(factorial(L + m1) * factorial(L - m1) *
                                factorial(L + m2) * factorial(L - m2));
  const double den = factorial(L + m2 - s) * factorial(s) *
                     factorial(m1 - m2 + s) * factorial(L - m1 - s);
  const double sign = ((m1 - m2 + s) % 2 == 0) ? 1.0 : -1.0;
  return pref * sign / den * std::pow(cos_half, 2 * L + m2 - m1 - 2 * s) *
         std::pow(sin_half, m1 - m2 + 2 * s);
}

}  // namespace

Eigen::Matrix3d euler_to_matrix(const EulerZYZ& e) {
  const double ca = std::cos(e.alpha), sa = std::sin(e.alpha);
  const double cb = std::cos(e.beta), sb = std::sin(e.beta);
  const double cg = std::cos(e.gamma), sg = std::sin(e.gamma);
  Eigen::Matrix3d r;
  r << ca * cb * cg - sa * sg, -ca * cb * sg - sa * cg, ca * sb,
       sa * cb * cg + ca * sg, -sa * cb * sg + ca * cg, sa * sb,
       -sb * cg, sb * sg, cb;
  return r;
}

EulerZYZ matrix_to_euler(const Eigen::Matrix3d& r) {
  const double sb = std::hypot(r(0, 2), r(1, 2));
  EulerZYZ e;
  e.beta = std::atan2(sb, r(2, 2));
  if (sb > 1e-12) {
    e.alpha = std::atan2(r(1, 2), r(0, 2));
    e.gamma = std::atan2(r(2, 1), -r(2, 0));
  } else if (r(2, 2) > 0.0) {  // beta ~ 0: pure z-rotation by alpha+gamma
    e.alpha = std::atan2(r(1, 0), r(0, 0));
    e.gamma = 0.0;
  } else {  // beta ~ pi
    e.alpha = std::atan2(-r(1, 0), -r(0, 0));
    e.gamma = 0.0;
  }
  return e;
}

Eigen::MatrixXd wigner_d_small(int n, double beta) {
  if (n < 0 || n > kMaxWignerDegree)
    throw std::domain_error("wigner_d_small: degree outside supported range");
  const int dim = 2 * n + 1;
  Eigen::MatrixXd d(dim, dim);
  const double c = std::cos(beta);
  const double ch = std::cos(beta / 2), sh = std::sin(beta / 2);

  for (int m1 = -n; m1 <= n; ++m1) {
    for (int m2 = -n; m2 <= n; ++m2) {
      const int L = std::max(std::abs(m1), std::abs(m2));
      double dl = wigner_seed(L, m1, m2, ch, sh);
      double dl_prev = 0.0;  // coefficient of d^{L-1} vanishes at l = L
      for (int l = L; l < n; ++l) {
        double next;
        if (l == 0) {
          next = c * dl;  // d^1_00 = cos(beta) * d^0_00
        } else {
          const double num =
              (2.0 * l + 1.0) * (l * (l + 1.0) * c - m1 * m2) * dl -
              (l + 1.0) *
                  std::sqrt(double(l * l - m1 * m1) * double(l * l - m2 * m2)) *
                  dl_prev;
          const double den =
              l * std::sqrt(double((l + 1) * (l + 1) - m1 * m1) *
                            double((l + 1) * (l + 1) - m2 * m2));
          next = num / den;
        }
        dl_prev = dl;
        dl = next;
      }
      d(m1 + n, m2 + n) = dl;
    }
  }
  return d;
}

Eigen::MatrixXcd wigner_D_complex(int n, const EulerZYZ& e) {
  const Eigen::MatrixXd d = wigner_d_small(n, e.beta);
  const int dim = 2 * n + 1;
  Eigen::MatrixXcd D(dim, dim);
  const std::complex<double> j(0.0, 1.0);
  for (int m1 = -n; m1 <= n; ++m1) {
    const std::complex<double> pa = std::exp(-j * (m1 * e.alpha));
    for (int m2 = -n; m2 <= n; ++m2) {
      const std::complex<double> pg = std::exp(-j * (m2 * e.gamma));
      D(m1 + n, m2 + n) = pa * d(m1 + n, m2 + n) * pg;
    }
  }
  return D;
}

namespace {

// Unitary change of basis from complex to real harmonics for one degree,
// rows indexed by the real mode mu, columns by the complex mode m. The
// combination cancels the Condon-Shortley phase so the result matches the
// phase-free real basis used by sh_eval.
Eigen::MatrixXcd real_basis_change(int n) {
  const int dim = 2 * n + 1;
  const std::complex<double> j(0.0, 1.0);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(dim, dim);
  u(n, n) = 1.0;
  for (int a = 1; a <= n; ++a) {
    const double sign = (a % 2 == 0) ? 1.0 : -1.0;
    u(a + n, -a + n) = inv_sqrt2;
    u(a + n, a + n) = sign * inv_sqrt2;
    u(-a + n, -a + n) = j * inv_sqrt2;
    u(-a + n, a + n) = -j * sign * inv_sqrt2;
  }
  return u;
}

}  // namespace

RealRotation RealRotation::identity(ShOrder order) {
  RealRotation r;
  r.order_ = order;
  r.blocks_.reserve(order.order + 1);
  for (int n = 0; n <= order.order; ++n)
    r.blocks_.push_back(Eigen::MatrixXd::Identity(2 * n + 1, 2 * n + 1));
  return r;
}

void RealRotation::apply(const double* x, double* y, bool transpose) const {
  int base = 0;
  for (int n = 0; n <= order_.order; ++n) {
    const int dim = 2 * n + 1;
    const Eigen::MatrixXd& b = blocks_[n];
    for (int i = 0; i < dim; ++i) {
      double acc = 0.0;
      for (int k = 0; k < dim; ++k)
        acc += (transpose ? b(k, i) : b(i, k)) * x[base + k];
      y[base + i] = acc;
    }
    base += dim;
  }
}

void RealRotation::apply(const std::complex<double>* x, std::complex<double>* y,
                         bool transpose) const {
  int base = 0;
  for (int n = 0; n <= order_.order; ++n) {
    const int dim = 2 * n + 1;
    const Eigen::MatrixXd& b = blocks_[n];
    for (int i = 0; i < dim; ++i) {
      std::complex<double> acc = 0.0;
      for (int k = 0; k < dim; ++k)
        acc += (transpose ? b(k, i) : b(i, k)) * x[base + k];
      y[base + i] = acc;
    }
    base += dim;
  }
}

Eigen::MatrixXd RealRotation::dense() const {
  const int dim = dimension();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
  int base = 0;
  for (int n = 0; n <= order_.order; ++n) {
    const int d = 2 * n + 1;
    m.block(base, base, d, d) = blocks_[n];
    base += d;
  }
  return m;
}

RealRotation RealRotation::transposed() const {
  RealRotation r;
  r.order_ = order_;
  r.blocks_.reserve(blocks_.size());
  for (const auto& b : blocks_) r.blocks_.push_back(b.transpose());
  return r;
}

RealRotation operator*(const RealRotation& a, const RealRotation& b) {
  if (a.order_.order != b.order_.order)
    throw std::invalid_argument("RealRotation: order mismatch");
  RealRotation r;
  r.order_ = a.order_;
  r.blocks_.reserve(a.blocks_.size());
  for (std::size_t n = 0; n < a.blocks_.size(); ++n)
    r.blocks_.push_back(a.blocks_[n] * b.blocks_[n]);
  return r;
}

RealRotation real_rotation(ShOrder order, const EulerZYZ& e) {
  if (order.order < 0 || order.order > kMaxShOrder)
    throw std::domain_error("real_rotation: order outside supported range");
  if (!std::isfinite(e.alpha) || !std::isfinite(e.beta) || !std::isfinite(e.gamma))
    throw std::domain_error("real_rotation: non-finite Euler angle");

  RealRotation r;
  r.order_ = order;
  r.blocks_.reserve(order.order + 1);
  for (int n = 0; n <= order.order; ++n) {
    const Eigen::MatrixXcd u = real_basis_change(n);
    const Eigen::MatrixXcd rc =
        u.conjugate() * wigner_D_complex(n, e) * u.transpose();
    if (rc.imag().cwiseAbs().maxCoeff() > kImagResidueTol)
      throw std::runtime_error("real_rotation: imaginary residue above tolerance");
    r.blocks_.push_back(rc.real());
  }
  return r;
}

RealRotation steering_matrix(const SphericalDirection& dir, ShOrder order) {
  const SphericalDirection d = SphericalDirection::checked(dir.azimuth, dir.elevation);
  return real_rotation(order, steering_euler(d));
}

void steer_frame_inplace(std::complex<double>* frame, int bins, int channels,
                         const RealRotation& rotation, bool inverse) {
  if (channels != rotation.dimension())
    throw std::invalid_argument("steer: channel count does not match rotation order");
  std::complex<double> tmp[(kMaxShOrder + 1) * (kMaxShOrder + 1)];
  for (int k = 0; k < bins; ++k) {
    std::complex<double>* v = frame + static_cast<std::size_t>(k) * channels;
    rotation.apply(v, tmp, inverse);
    std::copy(tmp, tmp + channels, v);
  }
}

SpectrogramTensor steer_signal(const SpectrogramTensor& spec,
                               const RealRotation& rotation, bool inverse) {
  SpectrogramTensor out = spec;
  for (int t = 0; t < out.frames; ++t)
    steer_frame_inplace(out.frame(t), out.bins, out.channels, rotation, inverse);
  return out;
}

}  // namespace ambisteer
