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

#include <concepts>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "shic/anisotropic.hpp"
#include "shic/image.hpp"
#include "shic/mask.hpp"
#include "shic/tonal.hpp"

namespace shic {

/// A reconstruction that can price a single-value change before committing it.
/// trial() returns the change of the global sum of squared errors if point k
/// took `value`; commit() applies the most recent trial.
template <typename M>
concept TrialModel = requires(M m, std::size_t k, double v) {
  { m.size() } -> std::convertible_to<std::size_t>;
  { m.trial(k, v) } -> std::convertible_to<double>;
  m.commit();
};

/// Unbiased integer in [0, n) from a 64-bit engine (portable, unlike
/// std::uniform_int_distribution).
std::uint64_t bounded_random(std::mt19937_64& rng, std::uint64_t n);

/// Fisher-Yates permutation of {0, ..., n - 1}.
std::vector<std::size_t> seeded_permutation(std::size_t n, std::mt19937_64& rng);

struct TrialReport {
  int accepted = 0;
  int evaluated = 0;
  int sweeps = 0;
  /// Sum of squared errors after each accepted change (relative to the start).
  std::vector<double> sse_deltas;
};

/// Random-walk tonal optimisation: each sweep visits the points in a seeded
/// random order and tries level + 1, then level - 1; a change is kept iff the
/// error strictly decreases.
template <TrialModel Model>
TrialReport tonal_optimize_trial(Model& model, std::vector<int>& levels, const Quantizer& quant,
                                 int sweeps, std::uint64_t seed) {
  TrialReport report;
  std::mt19937_64 rng(seed);
  double running = 0.0;
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    const int accepted_before = report.accepted;
    ++report.sweeps;
    const auto order = seeded_permutation(levels.size(), rng);
    for (std::size_t k : order) {
      for (int step : {+1, -1}) {
        const int candidate = levels[k] + step;
        if (candidate < 0 || candidate >= quant.levels()) continue;
        ++report.evaluated;
        const double delta = model.trial(k, quant.value(candidate));
        if (delta < 0.0) {
          model.commit();
          levels[k] = candidate;
          running += delta;
          report.sse_deltas.push_back(running);
          ++report.accepted;
          break;
        }
      }
    }
    if constexpr (requires { model.end_sweep(); }) model.end_sweep();
    // Nothing changed, so every later sweep would price the same trials again.
    if (report.accepted == accepted_before) break;
  }
  return report;
}

/// Reference model: every trial re-runs a full inpainting.
class FullReinpaintModel {
 public:
  using InpaintFn = std::function<GrayImage(std::span<const double>)>;

  FullReinpaintModel(std::vector<double> values, InpaintFn inpaint, GrayImage truth);

  std::size_t size() const { return values_.size(); }
  double trial(std::size_t k, double value);
  void commit();
  const GrayImage& reconstruction() const { return current_; }
  std::span<const double> values() const { return values_; }

 private:
  std::vector<double> values_;
  InpaintFn inpaint_;
  GrayImage truth_;
  GrayImage current_;
  double sse_ = 0.0;
  std::size_t pending_k_ = 0;
  double pending_value_ = 0.0;
  GrayImage pending_;
  double pending_sse_ = 0.0;
};

/// Generic entry point: tonal optimisation against an arbitrary inpainting
/// function, re-inpainting the whole image per trial.
std::vector<int> tonal_optimize_trial(std::vector<int> levels,
                                      const FullReinpaintModel::InpaintFn& inpaint, int q,
                                      const GrayImage& truth, int sweeps, std::uint64_t seed);

/// Shepard reconstruction (isotropic with per-point sigma, or anisotropic)
/// that re-evaluates only the region a value change can reach. Results are
/// bit-identical to a full inpaint_aniso() of the same values.
class ShepardTrialModel {
 public:
  /// lambda = kNoAnisotropy selects isotropic kernels without the derivative pass.
  ShepardTrialModel(std::span<const Point> positions, std::span<const double> values,
                    std::span<const double> sigmas, double lambda, GrayImage truth);

  std::size_t size() const { return values_.size(); }
  double trial(std::size_t k, double value);
  void commit();
  void end_sweep() {}

  const GrayImage& reconstruction() const { return u3_; }
  std::span<const double> values() const { return values_; }
  double sse() const { return sse_; }

 private:
  struct Pass1Update {
    int pixel;
    double v;
    double u;
  };
  struct Pass3Update {
    int pixel;
    double v;
    double w;
    double u;
  };

  // Weight tables of all kernels are kept when they fit in this many entries.
  static constexpr std::size_t kMaxCachedWeights = std::size_t{1} << 25;

  double fill_value(std::size_t k, double value) const;
  void fill_table(const OrientedKernel& ker, double* out) const;
  double hole_sse(double fill) const;

  int w_ = 0;
  int h_ = 0;
  std::vector<Point> positions_;
  std::vector<double> values_;
  std::vector<double> sigmas_;
  double lambda_;
  bool aniso_;
  GrayImage truth_;
  MaskIndex index_;

  // Derivative pass (anisotropic only).
  IsoKernel pass1_kernel_{1.0};
  AccumulationMaps pass1_;
  GrayImage u1_;
  std::vector<int> pass1_holes_;
  std::vector<std::size_t> hole_dependent_;

  std::vector<OrientedKernel> kernels_;
  int max_half_ = 0;
  bool cached_ = false;
  std::vector<std::size_t> table_offset_;
  std::vector<double> tables_;
  AccumulationMaps pass3_;
  GrayImage u3_;
  std::vector<int> pass3_holes_;
  double hole_sum_f_ = 0.0;
  double hole_sum_f2_ = 0.0;

  double fill_ = 0.0;
  double sse_ = 0.0;

  // Scratch for the pending trial.
  int trial_id_ = 0;
  Plane<int> pass1_stamp_;
  GrayImage pass1_tmp_;
  Plane<int> pass3_stamp_;
  GrayImage pass3_tmp_v_;
  GrayImage pass3_tmp_w_;
  std::vector<int> kernel_stamp_;
  std::vector<int> kernel_slot_;
  std::vector<double> new_weights_;
  std::vector<std::size_t> new_offset_;
  std::vector<OrientedKernel> kernel_tmp_;
  std::vector<std::size_t> changed_;
  std::vector<int> region_;
  std::vector<Pass1Update> pass1_updates_;
  std::vector<Pass3Update> pass3_updates_;
  std::size_t pending_k_ = 0;
  double pending_value_ = 0.0;
  double pending_fill_ = 0.0;
  double pending_delta_ = 0.0;
};

}  // namespace shic
