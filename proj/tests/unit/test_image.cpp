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
#include <string>

#include "shic/image.hpp"
#include "shic/mask.hpp"

using namespace shic;

namespace {

std::vector<std::uint8_t> bytes_of(const std::string& s) { return {s.begin(), s.end()}; }

}  // namespace

TEST_SUITE("image") {

TEST_CASE("pgm parsing") {
  auto p5 = bytes_of("P5 2 1 255 ");
  p5.push_back(0);
  p5.push_back(255);
  const GrayImage a = load_pgm(p5);
  CHECK(a.rows() == 1);
  CHECK(a.cols() == 2);
  CHECK(a(0, 0) == 0.0);
  CHECK(a(0, 1) == 255.0);

  const GrayImage b = load_pgm(bytes_of("P2 1 1 255\n128\n"));
  CHECK(b(0, 0) == 128.0);

  auto bad = bytes_of("P5 2 1 300 ");
  bad.push_back(0);
  bad.push_back(1);
  CHECK_THROWS_AS(load_pgm(bad), ParseError);
  CHECK_THROWS_AS(load_pgm(bytes_of("P5 4 4 255 ab")), ParseError);
  CHECK_THROWS_AS(load_pgm(bytes_of("P6 1 1 255 a")), ParseError);
}

TEST_CASE("pgm writing rounds to nearest") {
  GrayImage one(1, 1);
  one(0, 0) = 128.0;
  auto out = save_pgm(one);
  CHECK(out.back() == 0x80);
  one(0, 0) = 127.6;
  out = save_pgm(one);
  CHECK(out.back() == 128);
  one(0, 0) = 300.0;
  CHECK(save_pgm(one).back() == 255);

  const GrayImage disk = make_disk({400, 100.0, 255.0, 0.0});
  const auto bytes = save_pgm(disk);
  CHECK(save_pgm(load_pgm(bytes)) == bytes);
}

TEST_CASE("regular mask") {
  const MaskedData m = make_regular_mask(6, 6, 3);
  REQUIRE(m.size() == 4);
  CHECK(m.positions[0] == Point{0, 0});
  CHECK(m.positions[1] == Point{3, 0});
  CHECK(m.positions[2] == Point{0, 3});
  CHECK(m.positions[3] == Point{3, 3});
  CHECK(make_regular_mask(400, 400, 3).size() == 134u * 134u);
  CHECK(make_regular_mask(7, 5, 1).size() == 35u);
  CHECK(make_regular_mask(5, 5, 50).size() == 1u);
  CHECK(make_regular_mask(10, 7, 4).size() == 3u * 2u);
  CHECK_THROWS_AS(make_regular_mask(5, 5, 0), InvalidArgument);
}

TEST_CASE("disk") {
  // Circle test evaluated independently on all 9 pixels.
  for (double radius : {1.0, 0.5}) {
    const GrayImage d = make_disk({3, radius, 255.0, 0.0});
    for (int y = 0; y < 3; ++y) {
      for (int x = 0; x < 3; ++x) {
        const double dd = (x - 1.0) * (x - 1.0) + (y - 1.0) * (y - 1.0);
        CHECK(d(y, x) == (dd <= radius * radius ? 255.0 : 0.0));
      }
    }
  }
  const GrayImage d1 = make_disk({3, 1.0, 255.0, 0.0});
  CHECK(d1.sum() == 5 * 255.0);
  const GrayImage flat = make_disk({20, 5.0, 7.0, 7.0});
  CHECK((flat == 7.0).all());
}

TEST_CASE("mse") {
  GrayImage a = GrayImage::Constant(3, 4, 10.0);
  CHECK(mse(a, a) == 0.0);
  CHECK(mse(a, a + 1.0) == 1.0);
  GrayImage z = GrayImage::Zero(1, 2);
  GrayImage b(1, 2);
  b << 3, 4;
  CHECK(mse(z, b) == doctest::Approx(12.5).epsilon(1e-15));
  CHECK(mse(b, z) == mse(z, b));
  CHECK_THROWS_AS(mse(a, b), InvalidArgument);
}

TEST_CASE("ssim") {
  const GrayImage disk = make_disk({64, 20.0, 255.0, 0.0});
  CHECK(ssim(disk, disk) == doctest::Approx(1.0).epsilon(1e-12));
  const GrayImage negative = 255.0 - disk;
  CHECK(ssim(disk, negative) < 0.1);

  // Constant images: only the luminance term survives, in closed form.
  const GrayImage c128 = GrayImage::Constant(20, 20, 128.0);
  const GrayImage c130 = GrayImage::Constant(20, 20, 130.0);
  const double c1 = (0.01 * 255) * (0.01 * 255);
  const double expected = (2 * 128.0 * 130.0 + c1) / (128.0 * 128.0 + 130.0 * 130.0 + c1);
  CHECK(ssim(c128, c130) == doctest::Approx(expected).epsilon(1e-9));
  CHECK(ssim(c128, c130) > 0.99);

  CHECK_THROWS_AS(ssim(GrayImage::Zero(10, 10), GrayImage::Zero(10, 10)), InvalidArgument);
  CHECK_THROWS_AS(ssim(c128, GrayImage::Zero(20, 21)), InvalidArgument);
}

TEST_CASE("downsample averages blocks") {
  GrayImage img(3, 3);
  img << 0, 2, 4, 6, 8, 10, 12, 14, 16;
  const GrayImage d = downsample(img, 2);
  REQUIRE(d.rows() == 2);
  CHECK(d(0, 0) == doctest::Approx(4.0));
  CHECK(d(0, 1) == doctest::Approx(7.0));
  CHECK(d(1, 0) == doctest::Approx(13.0));
  CHECK(d(1, 1) == doctest::Approx(16.0));
}

}  // TEST_SUITE
