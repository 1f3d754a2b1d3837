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

#pragma once

#include <algorithm>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "shic/image.hpp"

namespace shic {

/// Inpainting mask: positions in canonical raster order plus the value stored
/// at each position. The meaning of `values` (grey value or quantised level)
/// is up to the caller.
struct MaskedData {
  int width = 0;
  int height = 0;
  std::vector<Point> positions;
  Eigen::VectorXd values;
  BoolPlane indicator;

  std::size_t size() const { return positions.size(); }
};

/// Builds a mask from arbitrary positions: sorts into raster order and removes
/// duplicates. Values are zero-initialised.
MaskedData make_mask(int width, int height, std::vector<Point> positions);

/// Every pixel with x mod r == 0 and y mod r == 0.
MaskedData make_regular_mask(int width, int height, int r);

/// Copies the image samples at the mask positions into `mask.values`.
void sample_values(MaskedData& mask, const GrayImage& img);

/// Row-bucketed view of a mask for range queries. Mask indices inside each row
/// are ascending in x, so walking rows top to bottom visits points in
/// canonical order.
class MaskIndex {
 public:
  MaskIndex() = default;
  MaskIndex(std::span<const Point> positions, int height);

  /// Calls fn(k) for every mask index k with |x_k - x| <= rx and
  /// |y_k - y| <= ry, in canonical order.
  template <typename Fn>
  void for_each_in_box(int x, int y, int rx, int ry, Fn&& fn) const {
    const int y0 = std::max(0, y - ry);
    const int y1 = std::min(height_ - 1, y + ry);
    for (int row = y0; row <= y1; ++row) {
      const int begin = row_start_[row];
      const int end = row_start_[row + 1];
      if (begin == end) continue;
      int k = lower_x(begin, end, x - rx);
      for (; k < end && xs_[k] <= x + rx; ++k) fn(k);
    }
  }

  /// Calls fn(k) for every mask index k inside [x0, x1] x [y0, y1], in
  /// canonical order.
  template <typename Fn>
  void for_each_in_rect(int x0, int x1, int y0, int y1, Fn&& fn) const {
    y0 = std::max(0, y0);
    y1 = std::min(height_ - 1, y1);
    for (int row = y0; row <= y1; ++row) {
      const int begin = row_start_[row];
      const int end = row_start_[row + 1];
      if (begin == end) continue;
      for (int k = lower_x(begin, end, x0); k < end && xs_[k] <= x1; ++k) fn(k);
    }
  }

  /// Nearest mask point (Euclidean), ties to the lowest index.
  int nearest(int x, int y) const;

 private:
  int lower_x(int begin, int end, int x) const;

  int height_ = 0;
  std::vector<int> row_start_;
  std::vector<int> xs_;
};

}  // namespace shic
