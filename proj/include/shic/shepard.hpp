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

#include <cmath>
#include <map>
#include <span>

#include "shic/image.hpp"
#include "shic/mask.hpp"

namespace shic {

/// Global Gaussian width adapted to the mask density: sqrt(m n / (pi |K|)).
double compute_sigma(std::size_t mask_count, int width, int height);

/// exp(-(a dx^2 + 2 b dx dy + c dy^2)). Every kernel in the library goes
/// through this expression so that isotropic and degenerate anisotropic
/// kernels agree bit for bit.
inline double form_weight(double a, double b, double c, double dx, double dy) {
  return std::exp(-(a * dx * dx + 2.0 * b * dx * dy + c * dy * dy));
}

/// exp(-(dx^2 + dy^2) / (2 sigma^2)).
inline double gaussian_weight(double dx, double dy, double sigma) {
  const double a = 1.0 / (2.0 * sigma * sigma);
  return form_weight(a, 0.0, a, dx, dy);
}

/// Half-width of the truncated window of a Gaussian with the given (major)
/// standard deviation. The nominal side is ceil(4 sigma) + 1; when that is
/// even it grows by one so the window stays centred.
int window_half(double sigma);

/// Precomputed truncated isotropic Gaussian.
class IsoKernel {
 public:
  explicit IsoKernel(double sigma);

  double sigma() const { return sigma_; }
  int half() const { return half_; }
  int side() const { return 2 * half_ + 1; }
  double operator()(int dx, int dy) const { return table_(dy + half_, dx + half_); }

 private:
  double sigma_;
  int half_;
  Plane<double> table_;
};

/// Kernel table lookup keyed by sigma, for masks with per-point widths.
class IsoKernelCache {
 public:
  const IsoKernel& get(double sigma);

 private:
  std::map<double, IsoKernel> kernels_;
};

/// Value (v) and weight (w) accumulation maps; the reconstruction is v / w.
struct AccumulationMaps {
  GrayImage v;
  GrayImage w;

  AccumulationMaps() = default;
  AccumulationMaps(int width, int height)
      : v(GrayImage::Zero(height, width)), w(GrayImage::Zero(height, width)) {}
};

/// Adds one mask point's weighted contribution to the maps.
void add_contribution(AccumulationMaps& maps, Point p, double value, const IsoKernel& kernel);

/// Scatters every mask point in canonical order.
AccumulationMaps accumulate(std::span<const Point> positions, std::span<const double> values,
                            const IsoKernel& kernel, int width, int height);
AccumulationMaps accumulate(std::span<const Point> positions, std::span<const double> values,
                            std::span<const double> sigmas, int width, int height);

/// v / w clamped to [0, 255]; pixels with w = 0 receive `hole_value`.
GrayImage normalize(const AccumulationMaps& maps, double hole_value);

/// Mean of the mask values, the fill value for uncovered pixels.
double hole_fill(std::span<const double> values);

GrayImage inpaint_iso(std::span<const Point> positions, std::span<const double> values,
                      double sigma, int width, int height);
/// Per-point standard deviations.
GrayImage inpaint_iso(std::span<const Point> positions, std::span<const double> values,
                      std::span<const double> sigmas, int width, int height);
/// Uses mask.values and the density-adapted sigma.
GrayImage inpaint_iso(const MaskedData& mask);

inline std::span<const double> as_span(const Eigen::VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

}  // namespace shic
