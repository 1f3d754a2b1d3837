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

#include "shic/container.hpp"
#include "shic/entropy.hpp"
#include "shic/mask.hpp"
#include "shic/rjip.hpp"
#include "shic/tonal.hpp"

using namespace shic;

namespace {

GrayImage scene(int w, int h) {
  GrayImage img(h, w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      img(y, x) = 60.0 + 40.0 * std::sin(x / 9.0) + 30.0 * std::cos(y / 13.0) +
                  (((x - w / 2) * (x - w / 2) + (y - h / 2) * (y - h / 2)) < w * h / 12 ? 70.0 : 0.0);
  return img;
}

}  // namespace

TEST_SUITE("codec-rjip") {

TEST_CASE("residual identity") {
  for (int q : {2, 7, 32})
    for (int p = 0; p < q; ++p)
      for (int l = 0; l < q; ++l) {
        const int e = ((p - l) % q + q) % q;
        REQUIRE(((p - e) % q + q) % q == l);
      }
}

TEST_CASE("encoder and decoder maps agree after every point") {
  const GrayImage img = scene(45, 38);
  const MaskedData mask = make_regular_mask(45, 38, 3);
  const Quantizer quant(24);
  std::vector<int> levels;
  for (const Point& p : mask.positions) levels.push_back(quant.level(img(p.y, p.x)));
  const IsoKernel kernel(compute_sigma(mask.size(), 45, 38));

  std::vector<AccumulationMaps> enc_steps;
  AccumulationMaps enc(45, 38), dec(45, 38);
  const auto residuals = rjip_residuals(mask.positions, levels, 24, kernel, enc,
                                        [&](std::size_t, const AccumulationMaps& m) {
                                          enc_steps.push_back(m);
                                        });
  // First point: nothing accumulated yet, so the prediction is level 0.
  CHECK(residuals[0] == ((0 - levels[0]) % 24 + 24) % 24);
  std::size_t mismatches = 0;
  const auto decoded = rjip_levels(mask.positions, residuals, 24, kernel, dec,
                                   [&](std::size_t k, const AccumulationMaps& m) {
                                     if (!(m.v == enc_steps[k].v).all() ||
                                         !(m.w == enc_steps[k].w).all())
                                       ++mismatches;
                                   });
  CHECK(mismatches == 0);
  CHECK(decoded == levels);
}

TEST_CASE("constant image costs almost nothing") {
  // A value on a level midpoint, so tonal optimisation has nothing to dither.
  const GrayImage flat = GrayImage::Constant(512, 512, dequantize(6, 16));
  const EncodeResult r = rjip_encode_fixed(flat, 4, 16);
  // Header (11) + r (1) + table (32) + length (4) + payload.
  const std::size_t overhead = 11 + 1 + 2 * 16 + 4;
  CHECK(r.file.size() - overhead <= 40u);
  CHECK((rjip_decode(r.file) - dequantize(6, 16)).abs().maxCoeff() < 1e-9);

  const MaskedData mask = make_regular_mask(512, 512, 4);
  const std::vector<int> levels(mask.size(), 11);
  AccumulationMaps maps(512, 512);
  const auto res = rjip_residuals(mask.positions, levels, 16, IsoKernel(compute_sigma(mask.size(), 512, 512)), maps);
  CHECK(res[0] == 5);
  CHECK(std::count(res.begin(), res.end(), 0) == static_cast<long>(res.size()) - 1);
  CHECK(range_encode(res, build_table(res, 16)).size() <= 40u);
}

TEST_CASE("decode reproduces the encoder exactly") {
  const GrayImage img = scene(64, 48);
  const EncodeResult r = rjip_encode_fixed(img, 3, 20);
  const GrayImage dec = rjip_decode(r.file);
  CHECK((dec == r.reconstruction).all());
  CHECK(mse(dec, img) == r.mse);

  RjipOptions quick;
  quick.alternations = 1;
  quick.golden_iterations = 4;
  quick.trial_sweeps = 1;
  const EncodeResult a = rjip_a_encode_fixed(img, 4, 16, 8.0, 1.0, quick);
  const GrayImage dec_a = rjip_decode(a.file);
  CHECK((dec_a == a.reconstruction).all());
  CHECK(mse(dec_a, img) == a.mse);
}

TEST_CASE("all-zero residuals decode to a constant image") {
  const int w = 20, h = 16, r = 4, q = 8;
  const std::size_t n = make_regular_mask(w, h, r).size();
  const std::vector<int> zeros(n, 0);
  const FrequencyTable table = build_table(zeros, q);
  const auto payload = range_encode(zeros, table);
  ByteWriter out;
  write_header(out, {CodecId::kRjip, w, h, q});
  out.u8(r);
  for (auto c : table.counts) out.u16(c);
  out.u32(static_cast<std::uint32_t>(payload.size()));
  out.bytes(payload);
  const GrayImage dec = rjip_decode(out.data());
  CHECK((dec == dequantize(0, q)).all());
}

TEST_CASE("malformed files are rejected") {
  const EncodeResult r = rjip_encode_fixed(scene(32, 32), 4, 8);
  auto bad = r.file;
  bad[0] = 'X';
  CHECK_THROWS_AS(rjip_decode(bad), ParseError);
  auto truncated = r.file;
  truncated.resize(truncated.size() - 3);
  CHECK_THROWS_AS(rjip_decode(truncated), ParseError);
  auto trailing = r.file;
  trailing.push_back(0);
  CHECK_THROWS_AS(rjip_decode(trailing), ParseError);
  auto version = r.file;
  version[4] = 9;
  CHECK_THROWS_AS(rjip_decode(version), ParseError);
}

TEST_CASE("huge lambda reduces to the isotropic pipeline") {
  const int w = 40, h = 30, r = 3, q = 32;
  const MaskedData mask = make_regular_mask(w, h, r);
  const GrayImage img = scene(w, h);
  const Quantizer quant(q);
  std::vector<int> levels;
  std::vector<double> values;
  for (const Point& p : mask.positions) {
    levels.push_back(quant.level(img(p.y, p.x)));
    values.push_back(quant.value(levels.back()));
  }
  const double sigma = 1.25 * compute_sigma(mask.size(), w, h);
  const GrayImage iso = inpaint_iso(mask.positions, values, sigma, w, h);
  const GrayImage a = rjip_a_reconstruct(w, h, r, q, levels, 1e12, 1.25);
  CHECK((a - iso).abs().maxCoeff() <= 1e-6);
}

TEST_CASE("anisotropic codec wins on a disk at equal grid") {
  const GrayImage disk = make_disk({120, 30.0, 255.0, 0.0});
  RjipOptions quick;
  quick.alternations = 1;
  quick.trial_sweeps = 1;
  quick.golden_iterations = 6;
  const EncodeResult iso = rjip_encode_fixed(disk, 3, 64);
  const EncodeResult aniso = rjip_a_encode_fixed(disk, 3, 64, 8.0, 1.0, quick);
  CHECK(aniso.mse < iso.mse);
}

TEST_CASE("larger spacing never grows the file") {
  const GrayImage img = scene(96, 80);
  for (int q : {8, 32}) {
    std::size_t prev = SIZE_MAX;
    for (int r = 2; r <= 9; ++r) {
      const std::size_t size = rjip_encode_fixed(img, r, q).file.size();
      CHECK(size <= prev);
      prev = size;
    }
  }
}

TEST_CASE("parameter search") {
  const GrayImage img = scene(64, 64);
  const SearchResult loose = search_params(img, 1.01, RjipMode::kIsotropic);
  CHECK(loose.feasible);
  CHECK(loose.params.r == 1);
  CHECK(loose.best.mse < 5.0);  // near-lossless: only quantisation and a slight blur remain

  const SearchResult s = search_params(img, 30.0, RjipMode::kIsotropic);
  CHECK(s.feasible);
  CHECK(s.best.ratio() >= 30.0 * (1.0 - kRatioTolerance));
  CHECK(static_cast<double>(img.size()) / static_cast<double>(s.best.file.size()) == s.best.ratio());
  CHECK(rjip_decode(s.best.file).isApprox(s.best.reconstruction));

  const SearchResult impossible = search_params(img, 1e6, RjipMode::kIsotropic);
  CHECK_FALSE(impossible.feasible);
}

}  // TEST_SUITE
