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

#include "shic/mask.hpp"

#include <algorithm>
#include <limits>

namespace shic {

MaskedData make_mask(int width, int height, std::vector<Point> positions) {
  if (width <= 0 || height <= 0) throw InvalidArgument("mask: empty domain");
  std::sort(positions.begin(), positions.end());
  positions.erase(std::unique(positions.begin(), positions.end()), positions.end());
  MaskedData m;
  m.width = width;
  m.height = height;
  m.indicator = BoolPlane::Constant(height, width, false);
  for (const Point& p : positions) {
    if (p.x < 0 || p.y < 0 || p.x >= width || p.y >= height) {
      throw InvalidArgument("mask: position out of bounds");
    }
    m.indicator(p.y, p.x) = true;
  }
  m.positions = std::move(positions);
  m.values = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m.positions.size()));
  return m;
}

MaskedData make_regular_mask(int width, int height, int r) {
  if (r < 1) throw InvalidArgument("make_regular_mask: r must be >= 1");
  std::vector<Point> pts;
  pts.reserve(static_cast<std::size_t>((width + r - 1) / r) * ((height + r - 1) / r));
  for (int y = 0; y < height; y += r) {
    for (int x = 0; x < width; x += r) pts.push_back({x, y});
  }
  return make_mask(width, height, std::move(pts));
}

void sample_values(MaskedData& mask, const GrayImage& img) {
  if (width(img) != mask.width || height(img) != mask.height) {
    throw InvalidArgument("sample_values: dimension mismatch");
  }
  mask.values.resize(static_cast<Eigen::Index>(mask.positions.size()));
  for (std::size_t k = 0; k < mask.positions.size(); ++k) {
    const Point& p = mask.positions[k];
    mask.values(static_cast<Eigen::Index>(k)) = img(p.y, p.x);
  }
}

MaskIndex::MaskIndex(std::span<const Point> positions, int height)
    : height_(height), row_start_(static_cast<std::size_t>(height) + 1, 0) {
  xs_.reserve(positions.size());
  for (const Point& p : positions) ++row_start_[p.y + 1];
  for (int r = 0; r < height; ++r) row_start_[r + 1] += row_start_[r];
  for (const Point& p : positions) xs_.push_back(p.x);
}

int MaskIndex::lower_x(int begin, int end, int x) const {
  return static_cast<int>(std::lower_bound(xs_.begin() + begin, xs_.begin() + end, x) -
                          xs_.begin());
}

int MaskIndex::nearest(int x, int y) const {
  long best_d2 = std::numeric_limits<long>::max();
  int best = -1;
  auto consider = [&](int k, int row) {
    const long dx = xs_[k] - x;
    const long dy = row - y;
    const long d2 = dx * dx + dy * dy;
    if (d2 < best_d2 || (d2 == best_d2 && k < best)) {
      best_d2 = d2;
      best = k;
    }
  };
  auto scan_row = [&](int row) {
    const int begin = row_start_[row];
    const int end = row_start_[row + 1];
    if (begin == end) return;
    const int k = lower_x(begin, end, x);
    // Closest on the right (or exact) and closest on the left.
    if (k < end) consider(k, row);
    if (k > begin) consider(k - 1, row);
  };
  scan_row(y);
  for (int off = 1; y - off >= 0 || y + off < height_; ++off) {
    if (static_cast<long>(off) * off > best_d2) break;
    if (y - off >= 0) scan_row(y - off);
    if (y + off < height_) scan_row(y + off);
  }
  return best;
}

}  // namespace shic
