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

#include "shic/anisotropic.hpp"

#include <cmath>

#include "shic/mask.hpp"
#include "shic/ops.hpp"

namespace shic {

GradientField compute_gradients(const GrayImage& img) {
  const int w = width(img), h = height(img);
  if (w < 2 || h < 2) throw InvalidArgument("compute_gradients: image must be at least 2x2");
  GradientField g{GrayImage(h, w), GrayImage(h, w)};
  auto sample = [&](int x, int y) { return img(y, x); };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) gradient_at(sample, w, h, x, y, g.fx(y, x), g.fy(y, x));
  }
  return g;
}

OrientedKernel isotropic_kernel(double sigma) {
  OrientedKernel k;
  k.theta = 0.0;
  k.sigma1 = k.sigma2 = sigma;
  k.alpha = k.gamma = 1.0 / (2.0 * sigma * sigma);
  k.beta = 0.0;
  k.half = window_half(sigma);
  return k;
}

OrientedKernel kernel_from_gradient(double fx, double fy, double sigma, double lambda) {
  if (!(sigma > 0.0) || !(lambda > 0.0)) {
    throw InvalidArgument("kernel_from_gradient: sigma and lambda must be positive");
  }
  const double g = diffusivity(fx * fx + fy * fy, lambda);
  if (g == 1.0) return isotropic_kernel(sigma);

  OrientedKernel k;
  // Direction of (fy, -fx), which is orthogonal to the gradient.
  k.theta = std::atan2(-fx, fy);
  k.sigma1 = sigma;
  k.sigma2 = sigma * std::sqrt(g);
  const double c = std::cos(k.theta);
  const double s = std::sin(k.theta);
  const double a1 = 1.0 / (2.0 * k.sigma1 * k.sigma1);
  const double a2 = 1.0 / (2.0 * k.sigma2 * k.sigma2);
  const double s2t = std::sin(2.0 * k.theta);
  k.alpha = c * c * a1 + s * s * a2;
  k.beta = s2t / 2.0 * (a1 - a2);
  k.gamma = s * s * a1 + c * c * a2;
  k.half = window_half(k.sigma1);
  return k;
}

LocalSigmaField voronoi_sigmas(std::span<const Point> positions, int width, int height,
                               double p) {
  if (positions.empty()) throw InvalidArgument("voronoi_sigmas: empty mask");
  if (p < 0.0) throw InvalidArgument("voronoi_sigmas: p must be non-negative");
  const MaskIndex index(positions, height);
  LocalSigmaField field;
  field.voronoi_area.assign(positions.size(), 0);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) ++field.voronoi_area[index.nearest(x, y)];
  }
  field.sigma.resize(positions.size());
  for (std::size_t k = 0; k < positions.size(); ++k) {
    field.sigma[k] = voronoi_sigma(field.voronoi_area[k], p);
  }
  return field;
}

GrayImage derivative_source(std::span<const Point> positions, std::span<const double> values,
                            int width, int height) {
  return inpaint_iso(positions, values, compute_sigma(positions.size(), width, height), width,
                     height);
}

std::vector<OrientedKernel> oriented_kernels(std::span<const Point> positions,
                                             std::span<const double> sigmas, double lambda,
                                             const GrayImage& source) {
  const int w = width(source), h = height(source);
  auto sample = [&](int x, int y) { return source(y, x); };
  std::vector<OrientedKernel> kernels(positions.size());
  for (std::size_t k = 0; k < positions.size(); ++k) {
    double fx, fy;
    gradient_at(sample, w, h, positions[k].x, positions[k].y, fx, fy);
    kernels[k] = kernel_from_gradient(fx, fy, sigmas[k], lambda);
  }
  return kernels;
}

AccumulationMaps accumulate_oriented(std::span<const Point> positions,
                                     std::span<const double> values,
                                     std::span<const OrientedKernel> kernels, int width,
                                     int height) {
  AccumulationMaps maps(width, height);
  std::uint64_t ops = 0;
  for (std::size_t k = 0; k < positions.size(); ++k) {
    const Point p = positions[k];
    const OrientedKernel& ker = kernels[k];
    const int x0 = std::max(0, p.x - ker.half), x1 = std::min(width - 1, p.x + ker.half);
    const int y0 = std::max(0, p.y - ker.half), y1 = std::min(height - 1, p.y + ker.half);
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        const double g = oriented_weight(ker, x - p.x, y - p.y);
        maps.w(y, x) += g;
        maps.v(y, x) += g * values[k];
      }
    }
    ops += static_cast<std::uint64_t>(y1 - y0 + 1) * (x1 - x0 + 1);
  }
  OpCounter::add(ops);
  return maps;
}

GrayImage inpaint_aniso(std::span<const Point> positions, std::span<const double> values,
                        std::span<const double> sigmas, double lambda, int width, int height) {
  if (positions.empty()) throw InvalidArgument("inpaint_aniso: empty mask");
  std::vector<OrientedKernel> kernels;
  if (std::isinf(lambda)) {
    kernels.reserve(positions.size());
    for (double s : sigmas) kernels.push_back(isotropic_kernel(s));
  } else {
    kernels = oriented_kernels(positions, sigmas, lambda,
                               derivative_source(positions, values, width, height));
  }
  return normalize(accumulate_oriented(positions, values, kernels, width, height),
                   hole_fill(values));
}

}  // namespace shic
