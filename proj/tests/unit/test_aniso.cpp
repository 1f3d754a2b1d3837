// Copyright 2026 The shic Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <cmath>
#include <random>

#include "shic/anisotropic.hpp"
#include "shic/mask.hpp"

using namespace shic;

TEST_SUITE("shepard-aniso") {

TEST_CASE("gradients are exact on affine images") {
  GrayImage flat = GrayImage::Constant(6, 7, 3.0);
  const auto g0 = compute_gradients(flat);
  CHECK((g0.fx == 0.0).all());
  CHECK((g0.fy == 0.0).all());

  GrayImage ramp(6, 7);
  for (int y = 0; y < 6; ++y)
    for (int x = 0; x < 7; ++x) ramp(y, x) = 2.0 * x + 3.0 * y;
  const auto g = compute_gradients(ramp);
  CHECK((g.fx == 2.0).all());
  CHECK((g.fy == 3.0).all());
}

TEST_CASE("diffusivity") {
  const double lambda = 3.7;
  CHECK(diffusivity(0.0, lambda) == 1.0);
  CHECK(diffusivity(lambda * lambda, lambda) == doctest::Approx(0.5));
  CHECK(diffusivity(3.0 * lambda * lambda, lambda) == doctest::Approx(0.25));
}

TEST_CASE("kernel shapes") {
  const OrientedKernel iso = kernel_from_gradient(0.0, 0.0, 1.7, 5.0);
  CHECK(iso.sigma1 == 1.7);
  CHECK(iso.sigma2 == 1.7);
  CHECK(iso.beta == 0.0);
  CHECK(iso.alpha == doctest::Approx(1.0 / (2.0 * 1.7 * 1.7)));
  CHECK(iso.gamma == doctest::Approx(iso.alpha));

  // Gradient along x: the kernel stretches along y.
  const double lambda = 4.0;
  const OrientedKernel across = kernel_from_gradient(lambda, 0.0, 2.0, lambda);
  CHECK(across.sigma2 == doctest::Approx(2.0 / std::sqrt(2.0)));
  CHECK(oriented_weight(across, 0.0, 1.5) > oriented_weight(across, 1.5, 0.0));

  // Gradient along y with g = 1/4: theta = 0, sigma1 = 2, sigma2 = 1.
  const OrientedKernel k = kernel_from_gradient(0.0, std::sqrt(3.0) * lambda, 2.0, lambda);
  CHECK(k.theta == doctest::Approx(0.0));
  CHECK(k.sigma2 == doctest::Approx(1.0));
  CHECK(k.alpha == doctest::Approx(1.0 / 8.0));
  CHECK(std::abs(k.beta) < 1e-15);
  CHECK(oriented_weight(k, 2.0, 0.0) == doctest::Approx(std::exp(-0.5)).epsilon(1e-14));
  CHECK(oriented_weight(k, 0.0, 0.0) == 1.0);
}

TEST_CASE("determinant identity and sigma ordering") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> grad(-60.0, 60.0);
  std::uniform_real_distribution<double> sig(0.5, 6.0);
  for (int i = 0; i < 1000; ++i) {
    const OrientedKernel k = kernel_from_gradient(grad(rng), grad(rng), sig(rng), 5.0);
    const double det = k.alpha * k.gamma - k.beta * k.beta;
    const double expected = 1.0 / (4.0 * k.sigma1 * k.sigma1 * k.sigma2 * k.sigma2);
    CHECK(std::abs(det - expected) <= 1e-12 * expected);
    CHECK(k.sigma2 <= k.sigma1);
  }
}

TEST_CASE("isotropic kernel matches the gaussian bit for bit") {
  const OrientedKernel k = isotropic_kernel(1.3);
  for (int dy = -3; dy <= 3; ++dy)
    for (int dx = -3; dx <= 3; ++dx) CHECK(oriented_weight(k, dx, dy) == gaussian_weight(dx, dy, 1.3));
}

TEST_CASE("voronoi areas against brute force") {
  const MaskedData m = make_regular_mask(12, 12, 4);
  const auto field = voronoi_sigmas(m.positions, 12, 12, 1.5);
  std::vector<long> area(m.size(), 0);
  for (int y = 0; y < 12; ++y) {
    for (int x = 0; x < 12; ++x) {
      std::size_t best = 0;
      long best_d = -1;
      for (std::size_t k = 0; k < m.size(); ++k) {
        const long dx = x - m.positions[k].x, dy = y - m.positions[k].y;
        const long d = dx * dx + dy * dy;
        if (best_d < 0 || d < best_d) {
          best_d = d;
          best = k;
        }
      }
      ++area[best];
    }
  }
  CHECK(field.voronoi_area == area);
  CHECK(field.voronoi_area[4] == 16);  // interior point (4, 4)
  for (std::size_t k = 0; k < m.size(); ++k) {
    CHECK(field.sigma[k] == doctest::Approx(std::pow(std::log(1.0 + area[k]), 1.5)));
  }

  const std::vector<Point> single{{3, 2}};
  const auto one = voronoi_sigmas(single, 9, 5, 2.0);
  CHECK(one.voronoi_area[0] == 45);
  CHECK(one.sigma[0] == doctest::Approx(std::pow(std::log(46.0), 2.0)));
  for (double s : voronoi_sigmas(m.positions, 12, 12, 0.0).sigma) CHECK(s == 1.0);
}

TEST_CASE("isotropic reduction") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> coord(0, 39);
  std::uniform_real_distribution<double> value(0.0, 255.0);
  std::uniform_real_distribution<double> sig(0.8, 3.0);
  std::vector<Point> pts;
  for (int i = 0; i < 60; ++i) pts.push_back({coord(rng), coord(rng)});
  const MaskedData m = make_mask(40, 40, pts);
  std::vector<double> v(m.size()), s(m.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = value(rng);
    s[i] = sig(rng);
  }
  const GrayImage iso = inpaint_iso(m.positions, v, s, 40, 40);
  const GrayImage off = inpaint_aniso(m.positions, v, s, kNoAnisotropy, 40, 40);
  CHECK((iso == off).all());
  const GrayImage huge = inpaint_aniso(m.positions, v, s, 1e12, 40, 40);
  CHECK((iso - huge).abs().maxCoeff() <= 1e-6);

  const double lo = *std::min_element(v.begin(), v.end());
  const double hi = *std::max_element(v.begin(), v.end());
  const GrayImage aniso = inpaint_aniso(m.positions, v, s, 2.0, 40, 40);
  CHECK(aniso.minCoeff() >= lo - 1e-9);
  CHECK(aniso.maxCoeff() <= hi + 1e-9);
}

TEST_CASE("constant data stays constant") {
  const MaskedData m = make_regular_mask(30, 20, 3);
  const std::vector<double> v(m.size(), 93.0);
  const std::vector<double> s(m.size(), 1.4);
  CHECK(((inpaint_aniso(m.positions, v, s, 3.0, 30, 20) - 93.0).abs() < 1e-12).all());
}

TEST_CASE("sharper than isotropic on a disk") {
  const GrayImage disk = make_disk({100, 25.0, 255.0, 0.0});
  MaskedData m = make_regular_mask(100, 100, 3);
  sample_values(m, disk);
  const std::vector<double> s(m.size(), compute_sigma(m.size(), 100, 100));
  const GrayImage iso = inpaint_iso(m);
  const GrayImage aniso = inpaint_aniso(m.positions, as_span(m.values), s, 32.0, 100, 100);
  CHECK(mse(aniso, disk) < mse(iso, disk));
}

}  // TEST_SUITE
