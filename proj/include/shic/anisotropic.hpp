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
#include <limits>
#include <span>
#include <vector>

#include "shic/image.hpp"
#include "shic/shepard.hpp"

namespace shic {

struct GradientField {
  GrayImage fx;
  GrayImage fy;
};

/// Central differences with unit spacing; one-sided at the image border.
GradientField compute_gradients(const GrayImage& img);

/// Gradient of `img` at a single pixel, same stencil as compute_gradients.
/// `sample(x, y)` supplies pixel values so callers can overlay pending edits.
template <typename Sample>
inline void gradient_at(Sample&& sample, int w, int h, int x, int y, double& fx, double& fy) {
  if (w < 2) {
    fx = 0.0;
  } else if (x == 0) {
    fx = sample(1, y) - sample(0, y);
  } else if (x == w - 1) {
    fx = sample(w - 1, y) - sample(w - 2, y);
  } else {
    fx = (sample(x + 1, y) - sample(x - 1, y)) / 2.0;
  }
  if (h < 2) {
    fy = 0.0;
  } else if (y == 0) {
    fy = sample(x, 1) - sample(x, 0);
  } else if (y == h - 1) {
    fy = sample(x, h - 1) - sample(x, h - 2);
  } else {
    fy = (sample(x, y + 1) - sample(x, y - 1)) / 2.0;
  }
}

/// Rational Perona-Malik diffusivity 1 / (1 + s2 / lambda^2).
inline double diffusivity(double s2, double lambda) {
  return 1.0 / (1.0 + s2 / (lambda * lambda));
}

/// Oriented Gaussian exp(-(alpha dx^2 + 2 beta dx dy + gamma dy^2)).
/// The major axis (sigma1) points along (cos theta, sin theta).
struct OrientedKernel {
  double theta = 0.0;
  double sigma1 = 1.0;
  double sigma2 = 1.0;
  double alpha = 0.5;
  double beta = 0.0;
  double gamma = 0.5;
  /// Truncation half-width, derived from sigma1.
  int half = 2;

  friend bool operator==(const OrientedKernel&, const OrientedKernel&) = default;
};

/// Isotropic kernel of standard deviation sigma (exactly matches IsoKernel).
OrientedKernel isotropic_kernel(double sigma);

/// Kernel whose major axis follows the isophote through a point with gradient
/// (fx, fy); the across-edge deviation shrinks by sqrt(g(|grad|^2)).
OrientedKernel kernel_from_gradient(double fx, double fy, double sigma, double lambda);

inline double oriented_weight(const OrientedKernel& k, double dx, double dy) {
  return form_weight(k.alpha, k.beta, k.gamma, dx, dy);
}

/// Per-point sigma derived from the discrete Voronoi cell area A_k:
/// sigma_k = ln(1 + A_k)^p.
struct LocalSigmaField {
  std::vector<double> sigma;
  std::vector<long> voronoi_area;
};

inline double voronoi_sigma(long area, double p) {
  return std::pow(std::log1p(static_cast<double>(area)), p);
}

LocalSigmaField voronoi_sigmas(std::span<const Point> positions, int width, int height, double p);

/// Pass-1 isotropic reconstruction used as the derivative source.
GrayImage derivative_source(std::span<const Point> positions, std::span<const double> values,
                            int width, int height);

/// One oriented kernel per mask point, derived from `source`.
std::vector<OrientedKernel> oriented_kernels(std::span<const Point> positions,
                                             std::span<const double> sigmas, double lambda,
                                             const GrayImage& source);

/// Scatters oriented kernels in canonical order.
AccumulationMaps accumulate_oriented(std::span<const Point> positions,
                                     std::span<const double> values,
                                     std::span<const OrientedKernel> kernels, int width,
                                     int height);

/// Three-pass anisotropic Shepard inpainting. lambda = +inf disables the
/// anisotropy (all kernels isotropic).
GrayImage inpaint_aniso(std::span<const Point> positions, std::span<const double> values,
                        std::span<const double> sigmas, double lambda, int width, int height);

inline constexpr double kNoAnisotropy = std::numeric_limits<double>::infinity();

}  // namespace shic
