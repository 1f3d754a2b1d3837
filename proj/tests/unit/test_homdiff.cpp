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

#include <random>

#include <Eigen/Dense>

#include "shic/homdiff.hpp"
#include "shic/mask.hpp"

using namespace shic;

TEST_SUITE("baseline-homdiff") {

TEST_CASE("constant data is already harmonic") {
  const MaskedData m = make_regular_mask(20, 15, 4);
  const std::vector<double> v(m.size(), 42.0);
  const HomResult r = inpaint_hom(m.positions, v, 20, 15);
  CHECK(r.converged);
  CHECK(((r.image - 42.0).abs() < 1e-9).all());
}

TEST_CASE("strip interpolates linearly") {
  // 1 x 5 strip, ends fixed: the 3 unknowns solve u[i-1] - 2u[i] + u[i+1] = 0,
  // i.e. equal steps between the end values.
  const std::vector<Point> ends{{0, 0}, {4, 0}};
  const std::vector<double> v{10.0, 50.0};
  SolverConfig cfg;
  cfg.tolerance = 1e-12;
  const HomResult r = inpaint_hom(ends, v, 5, 1, cfg);
  for (int x = 0; x < 5; ++x) CHECK(r.image(0, x) == doctest::Approx(10.0 + 10.0 * x).epsilon(1e-9));
}

TEST_CASE("maximum principle and initialisation independence") {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<int> coord(0, 29);
  std::uniform_real_distribution<double> val(30.0, 200.0);
  for (int n = 0; n < 5; ++n) {
    std::vector<Point> pts;
    for (int i = 0; i < 40; ++i) pts.push_back({coord(rng), coord(rng)});
    const MaskedData m = make_mask(30, 30, pts);
    std::vector<double> v(m.size());
    for (double& x : v) x = val(rng);
    SolverConfig cfg;
    cfg.tolerance = 1e-10;
    const HomResult a = inpaint_hom(m.positions, v, 30, 30, cfg);
    const double lo = *std::min_element(v.begin(), v.end());
    const double hi = *std::max_element(v.begin(), v.end());
    CHECK(a.converged);
    CHECK(a.image.minCoeff() >= lo - 1e-6);
    CHECK(a.image.maxCoeff() <= hi + 1e-6);

    const GrayImage start = GrayImage::Constant(30, 30, 255.0);
    const HomResult b = inpaint_hom(m.positions, v, 30, 30, cfg, &start);
    CHECK((a.image - b.image).abs().maxCoeff() < 1e-5);

    // Residual of the returned solution, recomputed from the stencil.
    BoolPlane fixed = BoolPlane::Constant(30, 30, false);
    for (const Point& p : m.positions) fixed(p.y, p.x) = true;
    double res2 = 0.0, b2 = 0.0;
    for (int y = 0; y < 30; ++y) {
      for (int x = 0; x < 30; ++x) {
        if (fixed(y, x)) continue;
        double lap = 0.0, rhs = 0.0;
        const int nx[4] = {x - 1, x + 1, x, x};
        const int ny[4] = {y, y, y - 1, y + 1};
        for (int k = 0; k < 4; ++k) {
          if (nx[k] < 0 || nx[k] >= 30 || ny[k] < 0 || ny[k] >= 30) continue;
          lap += a.image(ny[k], nx[k]) - a.image(y, x);
          if (fixed(ny[k], nx[k])) rhs += a.image(ny[k], nx[k]);
        }
        res2 += lap * lap;
        b2 += rhs * rhs;
      }
    }
    CHECK(std::sqrt(res2 / b2) <= 1e-9);
  }
}

TEST_CASE("least-squares tonal values match a dense solve") {
  // Columns of the reconstruction matrix are the inpaintings of unit vectors;
  // the optimum then comes from a dense QR least-squares solve.
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> val(0.0, 255.0);
  const MaskedData m = make_regular_mask(13, 11, 4);
  GrayImage truth(11, 13);
  for (Eigen::Index i = 0; i < truth.size(); ++i) truth.data()[i] = val(rng);
  const SolverConfig tight{1e-13, 20000};

  const auto n = static_cast<Eigen::Index>(m.size());
  Eigen::MatrixXd a(truth.size(), n);
  for (Eigen::Index k = 0; k < n; ++k) {
    std::vector<double> e(m.size(), 0.0);
    e[k] = 1.0;
    const GrayImage col = inpaint_hom(m.positions, e, 13, 11, tight).image;
    a.col(k) = Eigen::Map<const Eigen::VectorXd>(col.data(), col.size());
  }
  const Eigen::VectorXd f = Eigen::Map<const Eigen::VectorXd>(truth.data(), truth.size());
  const Eigen::VectorXd want = a.colPivHouseholderQr().solve(f);

  const std::vector<double> start(m.size(), 128.0);
  const LeastSquaresReport got = tonal_optimize_hom_ls(m.positions, start, truth, 500, 1e-12, tight);
  for (Eigen::Index k = 0; k < n; ++k) CHECK(got.values[k] == doctest::Approx(want(k)).epsilon(1e-6));
  const double best = (a * want - f).squaredNorm() / static_cast<double>(truth.size());
  CHECK(got.mse_after == doctest::Approx(best).epsilon(1e-8));
  CHECK(got.mse_after < got.mse_before);
}

}  // TEST_SUITE
