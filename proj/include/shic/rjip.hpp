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
#include <functional>
#include <span>
#include <vector>

#include "shic/image.hpp"
#include "shic/shepard.hpp"

namespace shic {

enum class RjipMode { kIsotropic, kAnisotropic };

struct RjipParams {
  int r = 4;
  int q = 32;
  RjipMode mode = RjipMode::kIsotropic;
  // Anisotropic only.
  double lambda = 0.0;
  double sigma_scale = 1.0;
};

/// Knobs of the encoders that do not travel in the file.
struct RjipOptions {
  int tonal_sweeps = 5;
  int trial_sweeps = 3;
  /// Rounds of (lambda, sigma_scale) search followed by trial tonal
  /// optimisation. Zero keeps the given parameters and skips the tonal step.
  int alternations = 2;
  int golden_iterations = 12;
  std::uint64_t seed = 1;
};

struct EncodeResult {
  std::vector<std::uint8_t> file;
  GrayImage reconstruction;
  RjipParams params;
  double mse = 0.0;

  double ratio() const {
    return static_cast<double>(reconstruction.size()) / static_cast<double>(file.size());
  }
};

/// Called after point k has been accumulated, with the maps at that moment.
using StepObserver = std::function<void(std::size_t, const AccumulationMaps&)>;

/// Joint inpainting and prediction, encoder side: returns the residuals and
/// leaves the final maps in `maps`.
std::vector<int> rjip_residuals(std::span<const Point> positions, std::span<const int> levels,
                                int q, const IsoKernel& kernel, AccumulationMaps& maps,
                                const StepObserver& observer = {});

/// Decoder side of the same traversal.
std::vector<int> rjip_levels(std::span<const Point> positions, std::span<const int> residuals,
                             int q, const IsoKernel& kernel, AccumulationMaps& maps,
                             const StepObserver& observer = {});

/// Regular-grid isotropic codec with closed-form tonal optimisation.
EncodeResult rjip_encode_fixed(const GrayImage& image, int r, int q,
                               const RjipOptions& options = {});

/// Regular-grid anisotropic codec. lambda and sigma_scale are the starting
/// point of the parameter search (or the final values if
/// options.alternations == 0).
EncodeResult rjip_a_encode_fixed(const GrayImage& image, int r, int q, double lambda,
                                 double sigma_scale, const RjipOptions& options = {});

/// Decodes RJIP and RJIP-A files.
GrayImage rjip_decode(std::span<const std::uint8_t> file);

/// Reconstruction of the anisotropic regular-grid pipeline for given levels.
GrayImage rjip_a_reconstruct(int width, int height, int r, int q, std::span<const int> levels,
                             double lambda, double sigma_scale);

struct SearchResult {
  RjipParams params;
  EncodeResult best;
  bool feasible = false;
  int probes = 0;
};

/// Relative slack below the target ratio that still counts as feasible.
inline constexpr double kRatioTolerance = 0.05;

/// Golden-section search over r (outer) and q (inner) for the lowest MSE whose
/// ratio reaches target * (1 - kRatioTolerance).
SearchResult search_params(const GrayImage& image, double target_ratio, RjipMode mode,
                           const RjipOptions& options = {});

}  // namespace shic
