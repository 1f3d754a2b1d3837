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

#include "shic/shepard.hpp"

#include <algorithm>
#include <numbers>
#include <numeric>

#include "shic/ops.hpp"

namespace shic {

double compute_sigma(std::size_t mask_count, int width, int height) {
  if (mask_count == 0) throw InvalidArgument("compute_sigma: empty mask");
  return std::sqrt(static_cast<double>(width) * height /
                   (std::numbers::pi * static_cast<double>(mask_count)));
}

int window_half(double sigma) {
  const int extent = static_cast<int>(std::ceil(4.0 * sigma));
  return (extent + 1) / 2;
}

IsoKernel::IsoKernel(double sigma) : sigma_(sigma), half_(window_half(sigma)) {
  if (!(sigma > 0.0)) throw InvalidArgument("IsoKernel: sigma must be positive");
  const double a = 1.0 / (2.0 * sigma * sigma);
  table_.resize(side(), side());
  for (int dy = -half_; dy <= half_; ++dy) {
    for (int dx = -half_; dx <= half_; ++dx) {
      table_(dy + half_, dx + half_) = form_weight(a, 0.0, a, dx, dy);
    }
  }
}

const IsoKernel& IsoKernelCache::get(double sigma) {
  auto it = kernels_.find(sigma);
  if (it == kernels_.end()) it = kernels_.emplace(sigma, IsoKernel(sigma)).first;
  return it->second;
}

void add_contribution(AccumulationMaps& maps, Point p, double value, const IsoKernel& kernel) {
  const int h = kernel.half();
  const int x0 = std::max(0, p.x - h), x1 = std::min<int>(maps.w.cols() - 1, p.x + h);
  const int y0 = std::max(0, p.y - h), y1 = std::min<int>(maps.w.rows() - 1, p.y + h);
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const double g = kernel(x - p.x, y - p.y);
      maps.w(y, x) += g;
      maps.v(y, x) += g * value;
    }
  }
  OpCounter::add(static_cast<std::uint64_t>(y1 - y0 + 1) * (x1 - x0 + 1));
}

AccumulationMaps accumulate(std::span<const Point> positions, std::span<const double> values,
                            const IsoKernel& kernel, int width, int height) {
  AccumulationMaps maps(width, height);
  for (std::size_t k = 0; k < positions.size(); ++k) {
    add_contribution(maps, positions[k], values[k], kernel);
  }
  return maps;
}

AccumulationMaps accumulate(std::span<const Point> positions, std::span<const double> values,
                            std::span<const double> sigmas, int width, int height) {
  AccumulationMaps maps(width, height);
  IsoKernelCache cache;
  for (std::size_t k = 0; k < positions.size(); ++k) {
    add_contribution(maps, positions[k], values[k], cache.get(sigmas[k]));
  }
  return maps;
}

GrayImage normalize(const AccumulationMaps& maps, double hole_value) {
  GrayImage out(maps.w.rows(), maps.w.cols());
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    const double w = maps.w.data()[i];
    const double u = w > 0.0 ? maps.v.data()[i] / w : hole_value;
    out.data()[i] = std::clamp(u, 0.0, 255.0);
  }
  return out;
}

double hole_fill(std::span<const double> values) {
  if (values.empty()) return 0.0;
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

GrayImage inpaint_iso(std::span<const Point> positions, std::span<const double> values,
                      double sigma, int width, int height) {
  if (positions.empty()) throw InvalidArgument("inpaint_iso: empty mask");
  const IsoKernel kernel(sigma);
  return normalize(accumulate(positions, values, kernel, width, height), hole_fill(values));
}

GrayImage inpaint_iso(std::span<const Point> positions, std::span<const double> values,
                      std::span<const double> sigmas, int width, int height) {
  if (positions.empty()) throw InvalidArgument("inpaint_iso: empty mask");
  return normalize(accumulate(positions, values, sigmas, width, height), hole_fill(values));
}

GrayImage inpaint_iso(const MaskedData& mask) {
  return inpaint_iso(mask.positions, as_span(mask.values),
                     compute_sigma(mask.size(), mask.width, mask.height), mask.width,
                     mask.height);
}

}  // namespace shic
