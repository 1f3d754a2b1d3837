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

#include "shic/eval.hpp"

using namespace shic;

namespace {

GrayImage scene(int w, int h) {
  GrayImage img(h, w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      img(y, x) = 90.0 + 50.0 * std::sin(x / 7.0) * std::cos(y / 11.0) + (x > y ? 40.0 : 0.0);
  return img;
}

}  // namespace

TEST_SUITE("eval") {

TEST_CASE("codec names") {
  for (Codec c : {Codec::kRjip, Codec::kRjipA, Codec::kTreeIso, Codec::kTreeAniso}) {
    CHECK(parse_codec(codec_label(c)) == c);
  }
  CHECK_FALSE(parse_codec("jpeg").has_value());
}

TEST_CASE("rd sweep recomputes everything from the file") {
  const GrayImage img = scene(48, 40);
  const std::vector<double> targets{8.0, 8.0, 20.0};
  const auto points = rd_sweep(img, Codec::kRjip, targets);
  REQUIRE(points.size() == 3);
  for (const auto& p : points) {
    const auto run = encode_for_ratio(img, Codec::kRjip, p.target_ratio);
    CHECK(p.achieved_ratio == static_cast<double>(img.size()) / static_cast<double>(run.file.size()));
    CHECK(p.mse == mse(decode_any(run.file), img));
    CHECK(p.ssim == ssim(decode_any(run.file), img));
  }
  CHECK(points[0].mse == points[1].mse);
  CHECK(points[0].op_count == points[1].op_count);
  CHECK(points[0].mse <= points[2].mse);

  const std::string csv = rd_csv(points, false);
  CHECK(csv.rfind(std::string(kRdCsvHeader) + "\n", 0) == 0);
  CHECK(csv == rd_csv(rd_sweep(img, Codec::kRjip, targets), false));
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);

  const std::vector<double> unsorted{20.0, 8.0};
  CHECK_THROWS_AS(rd_sweep(img, Codec::kRjip, unsorted), InvalidArgument);
}

TEST_CASE("every codec decodes through the common entry point") {
  const GrayImage img = scene(40, 32);
  EncodeSettings s;
  s.rjip.alternations = 1;
  s.rjip.golden_iterations = 4;
  s.rjip.trial_sweeps = 1;
  s.tree.golden_iterations = 4;
  s.tree_max_encodes = 4;
  for (Codec c : {Codec::kRjip, Codec::kRjipA, Codec::kTreeIso, Codec::kTreeAniso}) {
    CAPTURE(codec_label(c));
    const auto run = encode_for_ratio(img, c, 10.0, s);
    const GrayImage dec = decode_any(run.file);
    CHECK(dec.rows() == 32);
    CHECK(dec.cols() == 40);
    CHECK(mse(dec, img) < 2000.0);
  }
}

TEST_CASE("matched-ratio mse interpolates between bracketing encodes") {
  const GrayImage img = scene(64, 48);
  const double n = static_cast<double>(img.size());
  // An achieved ratio is its own bracket, so the measured MSE comes back.
  const auto run = encode_for_ratio(img, Codec::kRjip, 15.0);
  const double hit = n / static_cast<double>(run.file.size());
  const MatchedPoint same = mse_at_ratio(img, Codec::kRjip, hit);
  CHECK(same.bracketed);
  CHECK(same.mse == mse(decode_any(run.file), img));

  // Between two achieved ratios a bracket exists and is found.
  const auto lo_run = encode_for_ratio(img, Codec::kRjip, 10.0);
  const double lo = n / static_cast<double>(lo_run.file.size());
  const MatchedPoint m = mse_at_ratio(img, Codec::kRjip, std::sqrt(lo * hit));
  CHECK(m.bracketed);
  CHECK(std::isfinite(m.mse));
  CHECK(m.mse > 0.0);
  CHECK_THROWS_AS(mse_at_ratio(img, Codec::kRjip, 0.0), InvalidArgument);
}

TEST_CASE("log-log slope") {
  const std::vector<double> x{1.0, 10.0, 100.0, 1000.0};
  std::vector<double> y;
  for (double v : x) y.push_back(3.0 * std::pow(v, 1.1));
  CHECK(loglog_slope(x, y) == doctest::Approx(1.1).epsilon(1e-12));
}

TEST_CASE("scaling study structure") {
  const GrayImage img = scene(64, 64);
  const ScalingReport r = scaling_study(img, 3);
  REQUIRE(r.points.size() == 3);
  CHECK(r.points[0].width == 64);
  CHECK(r.points[1].width == 32);
  CHECK(r.points[2].width == 16);
  for (const auto& p : r.points) {
    CHECK(p.rjip_ops > 0);
    CHECK(p.rjip_a_ops > p.rjip_ops);
  }
  const std::string csv = scaling_csv(r, false);
  CHECK(csv == scaling_csv(scaling_study(img, 3), false));
}

}  // TEST_SUITE
