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

#include <doctest.h>

#include "ambisteer/sh.hpp"
#include "support/oracles.hpp"

using namespace ambisteer;

TEST_SUITE_BEGIN("sh");

TEST_CASE("assoc_legendre low orders") {
  CHECK(assoc_legendre(0, 0, 0.3) == 1.0);
  CHECK(assoc_legendre(1, 0, 0.5) == 0.5);
  CHECK(assoc_legendre(1, 1, 0.0) == doctest::Approx(1.0));  // no CS phase
}

TEST_CASE("assoc_legendre matches the series oracle") {
  CHECK(assoc_legendre(4, 2, 0.7) ==
        doctest::Approx(oracle::legendre_series(4, 2, 0.7)).epsilon(1e-12));
  Rng rng(7);
  for (int n = 0; n <= 8; ++n)
    for (int m = 0; m <= n; ++m) {
      const double x = rng.uniform(-1.0, 1.0);
      CHECK(assoc_legendre(n, m, x) ==
            doctest::Approx(oracle::legendre_series(n, m, x)).epsilon(1e-11));
    }
}

TEST_CASE("assoc_legendre domain errors") {
  CHECK_THROWS_AS(assoc_legendre(2, 3, 0.0), std::domain_error);
  CHECK_THROWS_AS(assoc_legendre(2, 1, 1.5), std::domain_error);
  CHECK_THROWS_AS(assoc_legendre(2, -1, 0.0), std::domain_error);
}

TEST_CASE("acn index is a bijection") {
  const ShOrder order{6};
  std::vector<int> seen(order.channel_count(), 0);
  for (int n = 0; n <= order.order; ++n)
    for (int m = -n; m <= n; ++m) {
      const int idx = acn_index(n, m);
      REQUIRE(idx >= 0);
      REQUIRE(idx < order.channel_count());
      ++seen[idx];
    }
  for (int c : seen) CHECK(c == 1);
}

TEST_CASE("first-order ambiX axis directions") {
  const ShOrder foa{1};
  auto front = sh_eval({0.0, 0.0}, foa);
  CHECK(front[0] == 1.0);
  CHECK(front[1] == doctest::Approx(0.0));
  CHECK(front[2] == doctest::Approx(0.0));
  CHECK(front[3] == doctest::Approx(1.0));

  auto left = sh_eval({kPi / 2, 0.0}, foa);
  CHECK(left[0] == 1.0);
  CHECK(left[1] == doctest::Approx(1.0));
  CHECK(left[2] == doctest::Approx(0.0));
  CHECK(left[3] == doctest::Approx(0.0).epsilon(1e-15));

  auto zenith = sh_eval({0.0, kPi / 2}, foa);
  CHECK(zenith[0] == 1.0);
  CHECK(zenith[1] == doctest::Approx(0.0));
  CHECK(zenith[2] == doctest::Approx(1.0));
  CHECK(zenith[3] == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("ambiX channel 0 is exactly 1") {
  Rng rng(11);
  for (int i = 0; i < 10000; ++i) {
    const auto y = sh_eval(oracle::random_direction(rng), ShOrder{3});
    CHECK(y[0] == 1.0);
  }
}

TEST_CASE("azimuth sign split: negating azimuth flips m<0 channels only") {
  Rng rng(23);
  const ShOrder order{4};
  for (int i = 0; i < 200; ++i) {
    const SphericalDirection d = oracle::random_direction(rng);
    const auto y = sh_eval(d, order);
    const auto yn = sh_eval({-d.azimuth, d.elevation}, order);
    for (int n = 0; n <= order.order; ++n)
      for (int m = -n; m <= n; ++m) {
        const int idx = acn_index(n, m);
        if (m < 0)
          CHECK(yn[idx] == doctest::Approx(-y[idx]).epsilon(1e-12));
        else
          CHECK(yn[idx] == doctest::Approx(y[idx]).epsilon(1e-12));
      }
  }
}

TEST_CASE("direction invariants") {
  CHECK_THROWS_AS(SphericalDirection::checked(0.0, 2.0), std::domain_error);
  CHECK_THROWS_AS(SphericalDirection::checked(0.0, -1.6), std::domain_error);
  CHECK(SphericalDirection::checked(kTwoPi + 0.5, 0.0).azimuth ==
        doctest::Approx(0.5));
  CHECK(SphericalDirection::checked(-kPi, 0.0).azimuth == doctest::Approx(kPi));
}

TEST_CASE("orthonormal Gram is the identity") {
  for (int n = 0; n <= 6; ++n) {
    const ShOrder order{n};
    const auto g = sh_gram(order, Normalization::Orthonormal,
                           SphereQuadrature::for_order(n));
    const double err =
        (g - Eigen::MatrixXd::Identity(order.channel_count(), order.channel_count()))
            .cwiseAbs()
            .maxCoeff();
    CHECK(err < 1e-10);
  }
}

TEST_CASE("ambiX first-order Gram is diag(1, 1/3, 1/3, 1/3) * 4pi") {
  const auto g = sh_gram(ShOrder{1}, Normalization::AmbiX,
                         SphereQuadrature::for_order(1));
  const double s = 4.0 * kPi;
  Eigen::Vector4d expected(1.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0);
  for (int i = 0; i < 4; ++i) {
    CHECK(g(i, i) == doctest::Approx(s * expected(i)).epsilon(1e-12));
    for (int j = 0; j < 4; ++j)
      if (i != j) CHECK(g(i, j) == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("insufficient quadrature degree is rejected") {
  const auto weak = SphereQuadrature::product_rule(2, 4);  // degree 3
  CHECK_THROWS_AS(sh_gram(ShOrder{3}, Normalization::Orthonormal, weak),
                  std::invalid_argument);
  CHECK(sh_gram(ShOrder{0}, Normalization::Orthonormal, weak)(0, 0) ==
        doctest::Approx(1.0));
}

TEST_SUITE_END();
