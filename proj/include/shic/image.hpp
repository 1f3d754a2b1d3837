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

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "shic/error.hpp"

namespace shic {

/// Dense row-major raster. Row index is y, column index is x.
template <typename Scalar>
using Plane = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Greyscale image held as real-valued intensities in [0, 255].
using GrayImage = Plane<double>;
using BoolPlane = Plane<bool>;

struct Point {
  int x = 0;
  int y = 0;

  friend bool operator==(const Point&, const Point&) = default;
  /// Raster order: y-major, then x.
  friend bool operator<(const Point& a, const Point& b) {
    return a.y != b.y ? a.y < b.y : a.x < b.x;
  }
};

inline int width(const GrayImage& img) { return static_cast<int>(img.cols()); }
inline int height(const GrayImage& img) { return static_cast<int>(img.rows()); }

// PGM I/O. Only maxval 255 is supported.
GrayImage load_pgm(std::span<const std::uint8_t> bytes);
GrayImage read_pgm_file(const std::string& path);
/// Binary P5. Samples are rounded to nearest and clamped to [0, 255].
std::vector<std::uint8_t> save_pgm(const GrayImage& img);
void write_pgm_file(const std::string& path, const GrayImage& img);

/// Rounds to the nearest integer and clamps to the 8-bit range.
GrayImage quantize_to_8bit(const GrayImage& img);

struct DiskSpec {
  int size = 400;
  double radius = 100.0;
  double inside = 255.0;
  double outside = 0.0;
};

/// Pixel (x, y) is `inside` iff (x - c)^2 + (y - c)^2 <= radius^2, c = (size - 1) / 2.
GrayImage make_disk(const DiskSpec& spec);

/// Mean squared error of two equally sized images.
template <typename A, typename B>
double mse(const Eigen::ArrayBase<A>& a, const Eigen::ArrayBase<B>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw InvalidArgument("mse: dimension mismatch");
  }
  if (a.size() == 0) return 0.0;
  return (a.derived() - b.derived()).square().sum() / static_cast<double>(a.size());
}

/// Mean structural similarity over all fully contained 11x11 windows
/// (Gaussian weights, sigma 1.5, K1 = 0.01, K2 = 0.03, L = 255).
double ssim(const GrayImage& a, const GrayImage& b);

/// Box-filter downsampling by an integer factor (partial blocks at the border
/// are averaged over their actual size).
GrayImage downsample(const GrayImage& img, int factor);

}  // namespace shic
