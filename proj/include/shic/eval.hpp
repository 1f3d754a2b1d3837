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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "shic/image.hpp"
#include "shic/rjip.hpp"
#include "shic/subdivision.hpp"

namespace shic {

enum class Codec { kRjip, kRjipA, kTreeIso, kTreeAniso };

const char* codec_label(Codec codec);
std::optional<Codec> parse_codec(const std::string& name);

/// Decodes any .shic file by its codec id.
GrayImage decode_any(std::span<const std::uint8_t> file);

struct CodecRun {
  std::vector<std::uint8_t> file;
  bool feasible = false;
};

struct EncodeSettings {
  RjipOptions rjip;
  TreeOptions tree;
  /// Band half-width around the target ratio for the tree codecs.
  double tree_tolerance = 0.05;
  int tree_max_encodes = 10;
};

/// Encodes towards a target compression ratio (parameter search for the grid
/// codecs, split-threshold tuning for the tree codecs).
CodecRun encode_for_ratio(const GrayImage& image, Codec codec, double target_ratio,
                          const EncodeSettings& settings = {});

struct MatchedPoint {
  double ratio = 0.0;
  double mse = 0.0;
  /// Encodes on both sides of the ratio were found and interpolated between.
  bool bracketed = false;
  int encodes = 0;
};

/// MSE a codec reaches at exactly `ratio`: encodes at nearby targets until
/// achieved ratios straddle it, then interpolates log MSE linearly in log
/// ratio between the two closest. Without a bracket the nearest encode is
/// returned as is.
MatchedPoint mse_at_ratio(const GrayImage& image, Codec codec, double ratio,
                          const EncodeSettings& settings = {}, int max_encodes = 6);

struct RdPoint {
  Codec codec = Codec::kRjip;
  double target_ratio = 0.0;
  double achieved_ratio = 0.0;
  double mse = 0.0;
  double ssim = 0.0;
  double encode_s = 0.0;
  double decode_s = 0.0;
  std::uint64_t op_count = 0;
  bool feasible = false;
};

/// One point per target. Ratio, MSE and SSIM are recomputed from the file and
/// an independent decode.
std::vector<RdPoint> rd_sweep(const GrayImage& image, Codec codec,
                              std::span<const double> targets,
                              const EncodeSettings& settings = {});

inline constexpr const char* kRdCsvHeader =
    "codec,target_ratio,achieved_ratio,mse,ssim,encode_s,decode_s,op_count,feasible";

/// CSV with header row. With `timings` off the time columns are written as 0
/// so the output is byte-stable.
std::string rd_csv(std::span<const RdPoint> points, bool timings = true);

struct DiskOptions {
  // MSE here grows with the edge length. Radius 90 gives an isotropic MSE
  // of about 92.
  DiskSpec disk{400, 90.0, 255.0, 0.0};
  int r = 3;
  int q = 256;
  int hom_sweeps = 3;
  int hom_radius = 12;
  RjipOptions aniso;
  std::uint64_t seed = 1;
};

struct DiskReport {
  double iso_mse_initial = 0.0;
  double iso_mse = 0.0;
  double hom_mse_initial = 0.0;
  double hom_mse = 0.0;     // trial tonal optimisation on q levels
  double hom_ls_mse = 0.0;  // continuous least-squares tonal values
  int hom_ls_iterations = 0;
  double aniso_mse = 0.0;
  double aniso_lambda = 0.0;
  double aniso_sigma_scale = 0.0;
  double iso_s = 0.0;
  double hom_s = 0.0;
  double hom_ls_s = 0.0;
  double aniso_s = 0.0;
};

DiskReport disk_experiment(const DiskOptions& options = {});

struct ScaleOptions {
  int r = 4;
  int q = 32;
  int hom_sweeps = 1;
  int aniso_alternations = 1;
  std::uint64_t seed = 1;
};

struct ScalePoint {
  int width = 0;
  int height = 0;
  double rjip_s = 0.0;
  double rjip_a_s = 0.0;
  double hom_s = 0.0;
  std::uint64_t rjip_ops = 0;
  std::uint64_t rjip_a_ops = 0;
  std::uint64_t hom_ops = 0;

  double pixels() const { return static_cast<double>(width) * height; }
};

struct ScalingReport {
  std::vector<ScalePoint> points;  // largest first
  double rjip_op_slope = 0.0;
  double rjip_time_slope = 0.0;
};

/// Encodes `levels` versions of the image (downsampled by 1, 2, 4, ...) with
/// RJIP, RJIP-A and the diffusion baseline at fixed r and q.
ScalingReport scaling_study(const GrayImage& image, int levels, const ScaleOptions& options = {});

std::string scaling_csv(const ScalingReport& report, bool timings = true);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace shic
