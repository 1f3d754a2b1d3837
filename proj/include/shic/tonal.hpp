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
#include <vector>

#include "shic/image.hpp"
#include "shic/shepard.hpp"

namespace shic {

/// Uniform scalar quantiser with q levels over [0, 256).
class Quantizer {
 public:
  explicit Quantizer(int q);

  int levels() const { return q_; }
  /// min(floor(f q / 256), q - 1); f is clamped to [0, 255] first.
  int level(double f) const;
  /// Interval midpoint (level + 0.5) 256 / q, clamped to [0, 255].
  double value(int level) const;

 private:
  int q_;
};

inline int quantize(double f, int q) { return Quantizer(q).level(f); }
inline double dequantize(int level, int q) { return Quantizer(q).value(level); }

/// Quantised mask values together with isotropic accumulation maps that are
/// kept consistent with them.
class TonalState {
 public:
  TonalState(std::vector<Point> positions, std::vector<int> levels, int q, double sigma,
             GrayImage truth);

  std::span<const Point> positions() const { return positions_; }
  std::span<const int> levels() const { return levels_; }
  std::span<const double> values() const { return values_; }
  const Quantizer& quantizer() const { return quantizer_; }
  const IsoKernel& kernel() const { return kernel_; }
  const AccumulationMaps& maps() const { return maps_; }
  const GrayImage& truth() const { return truth_; }
  int width() const { return static_cast<int>(truth_.cols()); }
  int height() const { return static_cast<int>(truth_.rows()); }

  /// Current reconstruction v / w with hole fill.
  GrayImage reconstruction() const;
  double mse() const;

  /// Sets point i to `level` and updates the value map incrementally.
  void set_level(std::size_t i, int level);
  /// Recomputes the maps from scratch.
  void rebuild();
  /// Largest absolute deviation between the maintained maps and a fresh
  /// accumulation.
  double drift() const;

 private:
  std::vector<Point> positions_;
  std::vector<int> levels_;
  std::vector<double> values_;
  Quantizer quantizer_;
  IsoKernel kernel_;
  AccumulationMaps maps_;
  GrayImage truth_;
};

/// Squared error over the window of point i after hypothetically replacing its
/// value by `candidate`, evaluated from the accumulation maps alone.
double tonal_error_iso(const TonalState& state, std::size_t i, double candidate);

/// Unconstrained minimiser of tonal_error_iso for point i.
double tonal_closed_form_iso(const TonalState& state, std::size_t i);

struct TonalIsoReport {
  int committed = 0;
  int rejected = 0;
};

/// Closed-form sweeps with quantised projection; a projected update is
/// committed only if it does not increase the error.
TonalIsoReport tonal_optimize_iso(TonalState& state, int sweeps = 5);

}  // namespace shic
