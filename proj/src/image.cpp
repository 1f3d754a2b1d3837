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

#include "shic/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <optional>

#include "shic/ops.hpp"

namespace shic {

thread_local std::uint64_t OpCounter::count_ = 0;

namespace {

class PgmCursor {
 public:
  explicit PgmCursor(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::optional<long> next_int() {
    skip_space_and_comments();
    if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) return std::nullopt;
    long value = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > 1'000'000'000) return std::nullopt;
      ++pos_;
    }
    return value;
  }

  bool at_end() const { return pos_ >= bytes_.size(); }
  std::size_t pos() const { return pos_; }
  void advance(std::size_t n) { pos_ += n; }
  std::uint8_t peek() const { return bytes_[pos_]; }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

GrayImage load_pgm(std::span<const std::uint8_t> bytes) {
  using Kind = ParseError::Kind;
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '2')) {
    throw ParseError(Kind::kHeader, "pgm: missing P5/P2 magic");
  }
  const bool binary = bytes[1] == '5';
  PgmCursor cur(bytes);
  cur.advance(2);
  if (cur.at_end() || !std::isspace(cur.peek())) {
    throw ParseError(Kind::kHeader, "pgm: malformed magic");
  }
  const auto w = cur.next_int();
  const auto h = cur.next_int();
  const auto maxval = cur.next_int();
  if (!w || !h || !maxval || *w <= 0 || *h <= 0 || *w > 65535 || *h > 65535) {
    throw ParseError(Kind::kHeader, "pgm: malformed header");
  }
  if (*maxval != 255) {
    throw ParseError(Kind::kMaxval, "pgm: unsupported maxval " + std::to_string(*maxval));
  }
  GrayImage img(*h, *w);
  const std::size_t count = static_cast<std::size_t>(*w) * static_cast<std::size_t>(*h);
  if (binary) {
    // Exactly one whitespace byte separates the header from the raster.
    if (cur.at_end() || !std::isspace(cur.peek())) {
      throw ParseError(Kind::kTruncated, "pgm: missing raster");
    }
    cur.advance(1);
    if (cur.remaining() < count) {
      throw ParseError(Kind::kTruncated, "pgm: truncated payload");
    }
    const std::uint8_t* data = bytes.data() + cur.pos();
    for (std::size_t i = 0; i < count; ++i) img.data()[i] = data[i];
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      cur.skip_space_and_comments();
      if (cur.at_end()) throw ParseError(Kind::kTruncated, "pgm: truncated payload");
      const auto v = cur.next_int();
      if (!v) throw ParseError(Kind::kHeader, "pgm: malformed sample");
      if (*v > 255) throw ParseError(Kind::kMaxval, "pgm: sample exceeds maxval");
      img.data()[i] = static_cast<double>(*v);
    }
  }
  return img;
}

GrayImage read_pgm_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return load_pgm(bytes);
}

GrayImage quantize_to_8bit(const GrayImage& img) {
  return img.round().max(0.0).min(255.0);
}

std::vector<std::uint8_t> save_pgm(const GrayImage& img) {
  const std::string header = "P5\n" + std::to_string(img.cols()) + " " +
                             std::to_string(img.rows()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(out.size() + static_cast<std::size_t>(img.size()));
  const GrayImage q = quantize_to_8bit(img);
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    out.push_back(static_cast<std::uint8_t>(q.data()[i]));
  }
  return out;
}

void write_pgm_file(const std::string& path, const GrayImage& img) {
  const auto bytes = save_pgm(img);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

GrayImage make_disk(const DiskSpec& spec) {
  if (spec.size <= 0 || !(spec.radius > 0.0) || !(spec.radius < spec.size / 2.0)) {
    throw InvalidArgument("make_disk: need 0 < radius < size / 2");
  }
  const double c = (spec.size - 1) / 2.0;
  const double r2 = spec.radius * spec.radius;
  GrayImage img(spec.size, spec.size);
  for (int y = 0; y < spec.size; ++y) {
    for (int x = 0; x < spec.size; ++x) {
      const double dx = x - c;
      const double dy = y - c;
      img(y, x) = dx * dx + dy * dy <= r2 ? spec.inside : spec.outside;
    }
  }
  return img;
}

namespace {

constexpr int kSsimWindow = 11;

// Separable "valid" filtering with a normalised 1-D Gaussian.
GrayImage filter_valid(const GrayImage& img, const Eigen::Array<double, kSsimWindow, 1>& k) {
  const Eigen::Index out_h = img.rows() - kSsimWindow + 1;
  const Eigen::Index out_w = img.cols() - kSsimWindow + 1;
  GrayImage rows_pass(img.rows(), out_w);
  for (Eigen::Index y = 0; y < img.rows(); ++y) {
    for (Eigen::Index x = 0; x < out_w; ++x) {
      double s = 0.0;
      for (int t = 0; t < kSsimWindow; ++t) s += k(t) * img(y, x + t);
      rows_pass(y, x) = s;
    }
  }
  GrayImage out(out_h, out_w);
  for (Eigen::Index y = 0; y < out_h; ++y) {
    for (Eigen::Index x = 0; x < out_w; ++x) {
      double s = 0.0;
      for (int t = 0; t < kSsimWindow; ++t) s += k(t) * rows_pass(y + t, x);
      out(y, x) = s;
    }
  }
  return out;
}

}  // namespace

double ssim(const GrayImage& a, const GrayImage& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw InvalidArgument("ssim: dimension mismatch");
  }
  if (a.rows() < kSsimWindow || a.cols() < kSsimWindow) {
    throw InvalidArgument("ssim: image smaller than the 11x11 window");
  }
  Eigen::Array<double, kSsimWindow, 1> k;
  for (int t = 0; t < kSsimWindow; ++t) {
    const double d = t - (kSsimWindow - 1) / 2;
    k(t) = std::exp(-d * d / (2.0 * 1.5 * 1.5));
  }
  k /= k.sum();

  constexpr double c1 = (0.01 * 255.0) * (0.01 * 255.0);
  constexpr double c2 = (0.03 * 255.0) * (0.03 * 255.0);
  const GrayImage mu_a = filter_valid(a, k);
  const GrayImage mu_b = filter_valid(b, k);
  const GrayImage aa = filter_valid(a * a, k);
  const GrayImage bb = filter_valid(b * b, k);
  const GrayImage ab = filter_valid(a * b, k);

  const GrayImage mu_ab = mu_a * mu_b;
  const GrayImage mu_aa = mu_a * mu_a;
  const GrayImage mu_bb = mu_b * mu_b;
  const GrayImage var_a = aa - mu_aa;
  const GrayImage var_b = bb - mu_bb;
  const GrayImage cov = ab - mu_ab;
  const GrayImage num = (2.0 * mu_ab + c1) * (2.0 * cov + c2);
  const GrayImage den = (mu_aa + mu_bb + c1) * (var_a + var_b + c2);
  return (num / den).mean();
}

GrayImage downsample(const GrayImage& img, int factor) {
  if (factor < 1) throw InvalidArgument("downsample: factor must be >= 1");
  const Eigen::Index h = (img.rows() + factor - 1) / factor;
  const Eigen::Index w = (img.cols() + factor - 1) / factor;
  GrayImage out(h, w);
  for (Eigen::Index y = 0; y < h; ++y) {
    for (Eigen::Index x = 0; x < w; ++x) {
      const Eigen::Index y0 = y * factor, x0 = x * factor;
      const Eigen::Index bh = std::min<Eigen::Index>(factor, img.rows() - y0);
      const Eigen::Index bw = std::min<Eigen::Index>(factor, img.cols() - x0);
      out(y, x) = img.block(y0, x0, bh, bw).mean();
    }
  }
  return out;
}

}  // namespace shic
