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

#include "shic/mask.hpp"
#include "shic/tonal.hpp"

using namespace shic;

namespace {

// Brute-force Shepard reconstruction without clamping, straight from the
// weight definition.
GrayImage brute_shepard(const std::vector<Point>& pos, const std::vector<double>& val,
                        double sigma, int w, int h) {
  const int half = IsoKernel(sigma).half();
  GrayImage v = GrayImage::Zero(h, w), wt = GrayImage::Zero(h, w);
  for (std::size_t k = 0; k < pos.size(); ++k) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const int dx = x - pos[k].x, dy = y - pos[k].y;
        if (std::abs(dx) > half || std::abs(dy) > half) continue;
        const double g = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
        v(y, x) += g * val[k];
        wt(y, x) += g;
      }
    }
  }
  return v / wt;
}

struct Instance {
  std::vector<Point> pos;
  std::vector<int> levels;
  GrayImage truth;
  double sigma;
};

Instance random_instance(std::mt19937_64& rng, int size, int q) {
  Instance in;
  std::uniform_real_distribution<double> pix(0.0, 255.0);
  std::uniform_int_distribution<int> lev(0, q - 1);
  in.truth.resize(size, size);
  for (int i = 0; i < in.truth.size(); ++i) in.truth.data()[i] = std::round(pix(rng));
  // Regular grid keeps every window covered.
  in.pos = make_regular_mask(size, size, 2).positions;
  for (std::size_t i = 0; i < in.pos.size(); ++i) in.levels.push_back(lev(rng));
  in.sigma = compute_sigma(in.pos.size(), size, size);
  return in;
}

double window_error(const GrayImage& u, const GrayImage& truth, Point c, int half) {
  double e = 0.0;
  for (int y = std::max(0, c.y - half); y <= std::min<int>(truth.rows() - 1, c.y + half); ++y)
    for (int x = std::max(0, c.x - half); x <= std::min<int>(truth.cols() - 1, c.x + half); ++x)
      e += (truth(y, x) - u(y, x)) * (truth(y, x) - u(y, x));
  return e;
}

}  // namespace

TEST_SUITE("tonal") {

TEST_CASE("quantiser") {
  CHECK(quantize(0, 16) == 0);
  CHECK(quantize(255, 16) == 15);
  CHECK(quantize(128, 2) == 1);
  CHECK(dequantize(0, 2) == 64.0);
  CHECK(dequantize(15, 16) == 248.0);
  for (int q = 2; q <= 256; ++q)
    for (int l = 0; l < q; ++l) REQUIRE(quantize(dequantize(l, q), q) == l);
  CHECK(dequantize(255, 256) == 255.0);
  CHECK_THROWS_AS(dequantize(16, 16), InvalidArgument);
}

TEST_CASE("local error matches a full re-accumulation") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> cand(0.0, 255.0);
  for (int n = 0; n < 100; ++n) {
    const Instance in = random_instance(rng, 16, 32);
    const TonalState st(in.pos, in.levels, 32, in.sigma, in.truth);
    const std::size_t i = static_cast<std::size_t>(n) % in.pos.size();
    const double c = cand(rng);
    std::vector<double> vals(st.values().begin(), st.values().end());
    vals[i] = c;
    const GrayImage u = brute_shepard(in.pos, vals, in.sigma, 16, 16);
    const double expected = window_error(u, in.truth, in.pos[i], st.kernel().half());
    CHECK(std::abs(tonal_error_iso(st, i, c) - expected) <= 1e-9 * std::max(1.0, expected));
  }
}

TEST_CASE("closed form beats a brute-force scan") {
  std::mt19937_64 rng(22);
  for (int n = 0; n < 100; ++n) {
    const Instance in = random_instance(rng, 16, 64);
    const TonalState st(in.pos, in.levels, 64, in.sigma, in.truth);
    const std::size_t i = static_cast<std::size_t>(n * 7) % in.pos.size();
    const double best = tonal_error_iso(st, i, tonal_closed_form_iso(st, i));
    for (double c = -128.0; c <= 384.0; c += 0.25) CHECK(best <= tonal_error_iso(st, i, c) + 1e-9);
  }
}

TEST_CASE("closed form of a lone point is the window mean") {
  GrayImage truth(9, 9);
  for (int y = 0; y < 9; ++y)
    for (int x = 0; x < 9; ++x) truth(y, x) = 10.0 * x + y;
  const TonalState st({{4, 4}}, {3}, 256, 1.0, truth);
  const int h = st.kernel().half();
  double sum = 0.0;
  int count = 0;
  for (int y = 4 - h; y <= 4 + h; ++y)
    for (int x = 4 - h; x <= 4 + h; ++x) {
      sum += truth(y, x);
      ++count;
    }
  const double mean = sum / count;
  CHECK(tonal_closed_form_iso(st, 0) == doctest::Approx(mean).epsilon(1e-12));
  double best_c = 0.0, best_e = 1e300;
  for (double c = 0.0; c <= 255.0; c += 0.01) {
    const double e = tonal_error_iso(st, 0, c);
    if (e < best_e) {
      best_e = e;
      best_c = c;
    }
  }
  CHECK(std::abs(best_c - mean) <= 0.01);

  TonalState opt({{4, 4}}, {3}, 256, 1.0, truth);
  tonal_optimize_iso(opt, 3);
  CHECK(opt.levels()[0] == quantize(mean, 256));
}

TEST_CASE("error of an unchanged value is the current local error") {
  std::mt19937_64 rng(23);
  const Instance in = random_instance(rng, 16, 16);
  const TonalState st(in.pos, in.levels, 16, in.sigma, in.truth);
  const GrayImage u = brute_shepard(in.pos, {st.values().begin(), st.values().end()}, in.sigma, 16, 16);
  for (std::size_t i = 0; i < in.pos.size(); i += 5) {
    CHECK(tonal_error_iso(st, i, st.values()[i]) ==
          doctest::Approx(window_error(u, in.truth, in.pos[i], st.kernel().half())));
  }
}

TEST_CASE("optimisation lowers the error and keeps the maps consistent") {
  const GrayImage disk = make_disk({60, 17.0, 255.0, 0.0});
  MaskedData m = make_regular_mask(60, 60, 3);
  std::vector<int> levels;
  for (const Point& p : m.positions) levels.push_back(quantize(disk(p.y, p.x), 64));
  TonalState st(m.positions, levels, 64, compute_sigma(m.size(), 60, 60), disk);
  const double before = st.mse();
  tonal_optimize_iso(st, 1);
  const double after_one = st.mse();
  tonal_optimize_iso(st, 3);
  CHECK(after_one < before);
  CHECK(st.mse() <= after_one);
  CHECK(st.drift() <= 1e-6);

  // Already optimal: nothing left to commit.
  const auto fixed_levels = std::vector<int>(st.levels().begin(), st.levels().end());
  TonalState again(m.positions, fixed_levels, 64, st.kernel().sigma(), disk);
  for (int s = 0; s < 20; ++s) tonal_optimize_iso(again, 1);
  const auto settled = std::vector<int>(again.levels().begin(), again.levels().end());
  tonal_optimize_iso(again, 1);
  CHECK(std::vector<int>(again.levels().begin(), again.levels().end()) == settled);
}

}  // TEST_SUITE
