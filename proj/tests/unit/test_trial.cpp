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

#include "shic/anisotropic.hpp"
#include "shic/homdiff.hpp"
#include "shic/mask.hpp"
#include "shic/trial.hpp"

using namespace shic;

namespace {

struct Setup {
  GrayImage truth;
  MaskedData mask;
  std::vector<double> sigmas;
};

Setup textured(int w, int h, int r, bool varying_sigma) {
  Setup s;
  s.truth = make_disk({std::max(w, h), std::min(w, h) / 3.0, 220.0, 30.0}).block(0, 0, h, w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) s.truth(y, x) += 15.0 * ((x / 3 + y / 5) % 2);
  s.mask = make_regular_mask(w, h, r);
  sample_values(s.mask, s.truth);
  const double base = compute_sigma(s.mask.size(), w, h);
  for (std::size_t k = 0; k < s.mask.size(); ++k) {
    s.sigmas.push_back(varying_sigma ? base * (0.6 + 0.15 * static_cast<double>(k % 7)) : base);
  }
  return s;
}

double sse(const GrayImage& a, const GrayImage& b) { return (a - b).square().sum(); }

}  // namespace

TEST_SUITE("trial") {

TEST_CASE("permutation is a deterministic bijection") {
  std::mt19937_64 a(99), b(99);
  const auto p = seeded_permutation(50, a);
  CHECK(p == seeded_permutation(50, b));
  auto sorted = p;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < 50; ++i) CHECK(sorted[i] == i);
  std::mt19937_64 r(3);
  for (int i = 0; i < 1000; ++i) CHECK(bounded_random(r, 7) < 7u);
}

TEST_CASE("incremental shepard model is bit-identical to full inpainting") {
  for (double lambda : {3.0, 40.0, kNoAnisotropy}) {
    for (bool varying : {false, true}) {
      CAPTURE(lambda);
      CAPTURE(varying);
      const Setup s = textured(37, 29, 3, varying);
      std::vector<double> values(as_span(s.mask.values).begin(), as_span(s.mask.values).end());
      ShepardTrialModel model(s.mask.positions, values, s.sigmas, lambda, s.truth);
      GrayImage current = inpaint_aniso(s.mask.positions, values, s.sigmas, lambda, 37, 29);
      CHECK((model.reconstruction() == current).all());

      std::mt19937_64 rng(4);
      std::uniform_real_distribution<double> val(0.0, 255.0);
      for (int step = 0; step < 40; ++step) {
        const std::size_t k = bounded_random(rng, values.size());
        const double v = val(rng);
        const double delta = model.trial(k, v);
        auto next_values = values;
        next_values[k] = v;
        const GrayImage next =
            inpaint_aniso(s.mask.positions, next_values, s.sigmas, lambda, 37, 29);
        CHECK(delta == doctest::Approx(sse(next, s.truth) - sse(current, s.truth)).epsilon(1e-9));
        if (step % 2 == 0) {
          model.commit();
          values = next_values;
          current = next;
          REQUIRE((model.reconstruction() == current).all());
        }
      }
    }
  }
}

TEST_CASE("random walk never increases the error and is reproducible") {
  const Setup s = textured(30, 30, 3, false);
  const Quantizer quant(32);
  std::vector<int> start;
  for (double v : as_span(s.mask.values)) start.push_back(quant.level(v));
  auto run = [&](std::uint64_t seed, TrialReport* report) {
    std::vector<int> levels = start;
    std::vector<double> values;
    for (int l : levels) values.push_back(quant.value(l));
    ShepardTrialModel model(s.mask.positions, values, s.sigmas, 5.0, s.truth);
    *report = tonal_optimize_trial(model, levels, quant, 3, seed);
    return levels;
  };
  TrialReport a, b;
  const auto la = run(17, &a);
  const auto lb = run(17, &b);
  CHECK(la == lb);
  CHECK(a.sse_deltas == b.sse_deltas);
  REQUIRE(a.accepted > 0);
  for (std::size_t i = 1; i < a.sse_deltas.size(); ++i) CHECK(a.sse_deltas[i] < a.sse_deltas[i - 1]);
  CHECK(a.sse_deltas.front() < 0.0);

  // Optimised levels are a fixed point of a fresh run only if the last sweep
  // accepted nothing; a constant truth matched exactly is.
  const GrayImage flat = GrayImage::Constant(20, 20, quant.value(9));
  MaskedData m = make_regular_mask(20, 20, 4);
  std::vector<int> levels(m.size(), 9);
  const std::vector<double> values(m.size(), quant.value(9));
  const std::vector<double> sig(m.size(), 1.5);
  ShepardTrialModel flat_model(m.positions, values, sig, kNoAnisotropy, flat);
  const TrialReport r = tonal_optimize_trial(flat_model, levels, quant, 3, 1);
  CHECK(r.accepted == 0);
  CHECK(levels == std::vector<int>(m.size(), 9));
}

TEST_CASE("generic re-inpainting entry point") {
  const Setup s = textured(24, 24, 4, false);
  const Quantizer quant(16);
  std::vector<int> levels;
  for (double v : as_span(s.mask.values)) levels.push_back(quant.level(v));
  auto inpaint = [&](std::span<const double> v) {
    return inpaint_iso(s.mask.positions, v, s.sigmas, 24, 24);
  };
  auto err = [&](const std::vector<int>& lv) {
    std::vector<double> v;
    for (int l : lv) v.push_back(quant.value(l));
    return mse(inpaint(v), s.truth);
  };
  const auto out = tonal_optimize_trial(levels, inpaint, 16, s.truth, 2, 5);
  CHECK(err(out) < err(levels));
  CHECK(out == tonal_optimize_trial(levels, inpaint, 16, s.truth, 2, 5));
}

TEST_CASE("local diffusion model agrees with the global one") {
  const Setup s = textured(26, 22, 3, false);
  const std::vector<double> values(as_span(s.mask.values).begin(), as_span(s.mask.values).end());
  SolverConfig cfg;
  cfg.tolerance = 1e-10;
  HomGlobalModel global(s.mask.positions, values, s.truth, cfg);
  HomLocalModel local(s.mask.positions, values, s.truth, 40, cfg);
  std::mt19937_64 rng(8);
  for (int step = 0; step < 15; ++step) {
    const std::size_t k = bounded_random(rng, values.size());
    const double v = static_cast<double>(bounded_random(rng, 256));
    const double dg = global.trial(k, v);
    const double dl = local.trial(k, v);
    CHECK(dl == doctest::Approx(dg).epsilon(1e-5).scale(1.0));
    global.commit();
    local.commit();
  }
  local.end_sweep();
  CHECK((local.reconstruction() - global.reconstruction()).abs().maxCoeff() < 1e-5);
}

}  // TEST_SUITE
