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

#include "ambisteer/sh.hpp"

#include <cmath>
#include <stdexcept>

namespace ambisteer {

double assoc_legendre(int n, int m, double x) {
  if (n < 0 || m < 0 || m > n)
    throw std::domain_error("assoc_legendre: requires 0 <= m <= n");
  if (!(x >= -1.0 && x <= 1.0))
    throw std::domain_error("assoc_legendre: |x| must be <= 1");

  // P_m^m = (2m-1)!! (1-x^2)^{m/2}, then two-term upward recursion in n.
  double pmm = 1.0;
  if (m > 0) {
    const double s = std::sqrt((1.0 - x) * (1.0 + x));
    double f = 1.0;
    for (int i = 1; i <= m; ++i) {
      pmm *= f * s;
      f += 2.0;
    }
  }
  if (n == m) return pmm;
  double pmm1 = x * (2.0 * m + 1.0) * pmm;
  if (n == m + 1) return pmm1;
  double p = 0.0;
  for (int k = m + 2; k <= n; ++k) {
    p = (x * (2.0 * k - 1.0) * pmm1 - (k + m - 1.0) * pmm) / (k - m);
    pmm = pmm1;
    pmm1 = p;
  }
  return p;
}

namespace {

double norm_factor(int n, int m, Normalization norm) {
  // SN3D: sqrt((2 - delta_m0) (n-|m|)! / (n+|m|)!); orthonormal adds
  // sqrt((2n+1)/(4 pi)).
  double ratio = 1.0;
  for (int k = n - m + 1; k <= n + m; ++k) ratio *= k;  // (n+m)!/(n-m)!
  double f = std::sqrt((m == 0 ? 1.0 : 2.0) / ratio);
  if (norm == Normalization::Orthonormal)
    f *= std::sqrt((2.0 * n + 1.0) / (4.0 * kPi));
  return f;
}

}  // namespace

std::vector<double> sh_eval(const SphericalDirection& dir, ShOrder order,
                            Normalization norm) {
  if (order.order < 0 || order.order > kMaxShOrder)
    throw std::domain_error("sh_eval: order outside supported range");
  const SphericalDirection d = SphericalDirection::checked(dir.azimuth, dir.elevation);
  const double se = std::sin(d.elevation);

  std::vector<double> y(order.channel_count());
  for (int n = 0; n <= order.order; ++n) {
    for (int m = -n; m <= n; ++m) {
      const int am = std::abs(m);
      double v = norm_factor(n, am, norm) * assoc_legendre(n, am, se);
      if (m < 0)
        v *= std::sin(am * d.azimuth);
      else if (m > 0)
        v *= std::cos(m * d.azimuth);
      y[acn_index(n, m)] = v;
    }
  }
  if (norm == Normalization::AmbiX) y[0] = 1.0;  // exact by definition
  return y;
}

SphereQuadrature SphereQuadrature::product_rule(int elevation_nodes,
                                                int azimuth_steps) {
  if (elevation_nodes < 1 || azimuth_steps < 1)
    throw std::invalid_argument("SphereQuadrature: empty rule");

  // Gauss-Legendre nodes on [-1, 1] by Newton iteration on P_n.
  const int n = elevation_nodes;
  std::vector<double> gx(n), gw(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      if (n == 1) p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double pn = (n == 1) ? x : p1;
      const double pn1 = (n == 1) ? 1.0 : p0;
      dp = n * (x * pn - pn1) / (x * x - 1.0);
      const double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    gx[i] = x;
    gw[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }

  SphereQuadrature q;
  q.exact_degree = std::min(2 * elevation_nodes - 1, azimuth_steps - 1);
  q.nodes.reserve(static_cast<std::size_t>(n) * azimuth_steps);
  const double waz = kTwoPi / azimuth_steps;
  for (int i = 0; i < n; ++i) {
    const double el = std::asin(gx[i]);
    for (int j = 0; j < azimuth_steps; ++j) {
      const double az = wrap_angle(waz * j);
      q.nodes.push_back({SphericalDirection{az, el}, gw[i] * waz});
    }
  }
  return q;
}

Eigen::MatrixXd sh_gram(ShOrder order, Normalization norm,
                        const SphereQuadrature& quadrature) {
  if (quadrature.exact_degree < 2 * order.order)
    throw std::invalid_argument("sh_gram: quadrature degree insufficient");
  const int c = order.channel_count();
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(c, c);
  for (const auto& node : quadrature.nodes) {
    const std::vector<double> y = sh_eval(node.dir, order, norm);
    const Eigen::Map<const Eigen::VectorXd> v(y.data(), c);
    g.noalias() += node.weight * v * v.transpose();
  }
  return g;
}

}  // namespace ambisteer
