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

#include <array>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "shic/image.hpp"

namespace shic {

struct SolverConfig {
  double tolerance = 1e-6;
  int max_iterations = 20000;
};

struct HomResult {
  GrayImage image;
  int iterations = 0;
  double residual = 0.0;  // relative residual ||b - Ax|| / ||b||
  bool converged = false;
};

/// Discrete Laplace problem on the non-mask pixels: 5-point stencil, unit
/// grid, mirrored (zero-flux) image boundary, mask pixels fixed to their
/// values. Matrix-free and applied to a vector of unknowns.
class LaplaceSystem {
 public:
  LaplaceSystem(std::span<const Point> positions, int width, int height);

  int width() const { return w_; }
  int height() const { return h_; }
  Eigen::Index unknowns() const { return static_cast<Eigen::Index>(pixel_of_.size()); }

  /// Right-hand side from the mask values.
  Eigen::VectorXd rhs(std::span<const double> values) const;
  /// Adjoint of rhs(): scatters y back onto the mask points.
  std::vector<double> rhs_adjoint(const Eigen::VectorXd& y) const;
  void apply(const Eigen::VectorXd& x, Eigen::VectorXd& out) const;
  /// Unknown vector from an image, and image from unknowns plus mask values.
  Eigen::VectorXd gather(const GrayImage& img) const;
  GrayImage scatter(const Eigen::VectorXd& x, std::span<const double> values) const;

 private:
  int w_, h_;
  std::vector<Point> positions_;
  std::vector<int> pixel_of_;          // unknown -> pixel
  std::vector<int> unknown_of_;        // pixel -> unknown or -1
  std::vector<int> mask_of_;           // pixel -> mask index or -1
  std::vector<std::array<int, 4>> nbr_;  // unknown neighbours (-1 if none)
  std::vector<std::array<int, 4>> fixed_;  // mask neighbours (-1 if none)
  std::vector<double> degree_;
};

/// Unpreconditioned conjugate gradients on `sys`; x holds the initial guess.
/// Returns the iteration count and the achieved relative residual.
struct CgStats {
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
};
CgStats conjugate_gradient(const LaplaceSystem& sys, const Eigen::VectorXd& b,
                           Eigen::VectorXd& x, const SolverConfig& config);

/// Homogeneous diffusion inpainting. Non-mask pixels start at the mean of the
/// mask values unless `initial` is given.
HomResult inpaint_hom(std::span<const Point> positions, std::span<const double> values,
                      int width, int height, const SolverConfig& config = {},
                      const GrayImage* initial = nullptr);

struct LeastSquaresReport {
  std::vector<double> values;
  int iterations = 0;
  double mse_before = 0.0;
  double mse_after = 0.0;
};

/// Continuous tonal optimisation for homogeneous diffusion: the mask values
/// minimising the reconstruction MSE, by conjugate gradients on the normal
/// equations. Values are neither quantised nor clipped to [0, 255].
LeastSquaresReport tonal_optimize_hom_ls(std::span<const Point> positions,
                                         std::span<const double> values, const GrayImage& truth,
                                         int max_iterations = 500, double tolerance = 1e-6,
                                         const SolverConfig& inner = {1e-10, 20000});

/// Trial model that re-solves the whole Laplace problem for every trial,
/// warm-started from the current solution.
class HomGlobalModel {
 public:
  HomGlobalModel(std::span<const Point> positions, std::span<const double> values,
                 GrayImage truth, SolverConfig config = {});

  std::size_t size() const { return values_.size(); }
  double trial(std::size_t k, double value);
  void commit();
  const GrayImage& reconstruction() const { return image_; }

 private:
  LaplaceSystem sys_;
  std::vector<double> values_;
  GrayImage truth_;
  SolverConfig config_;
  Eigen::VectorXd x_;
  GrayImage image_;
  double sse_ = 0.0;
  std::size_t pending_k_ = 0;
  double pending_value_ = 0.0;
  Eigen::VectorXd pending_x_;
  GrayImage pending_image_;
  double pending_sse_ = 0.0;
};

/// Trial model exploiting linearity: changing one Dirichlet value by delta
/// moves the solution by delta times that point's discrete Green's function,
/// computed on a window of the given radius around the point. A full warm-
/// started re-solve at the end of every sweep removes the truncation error.
class HomLocalModel {
 public:
  HomLocalModel(std::span<const Point> positions, std::span<const double> values,
                GrayImage truth, int radius, SolverConfig config = {});

  std::size_t size() const { return values_.size(); }
  double trial(std::size_t k, double value);
  void commit();
  void end_sweep();
  const GrayImage& reconstruction() const { return image_; }

 private:
  struct GreenFunction {
    std::vector<int> pixels;  // the point itself is always included
    std::vector<double> values;
  };
  static constexpr double kGreenCutoff = 1e-9;
  static constexpr std::size_t kMaxCachedEntries = std::size_t{1} << 24;

  void green(std::size_t k);
  const GreenFunction& green_of(std::size_t k);

  std::vector<Point> positions_;
  std::vector<double> values_;
  GrayImage truth_;
  int radius_;
  SolverConfig config_;
  LaplaceSystem sys_;
  Eigen::VectorXd x_;
  GrayImage image_;
  BoolPlane is_mask_;

  std::vector<GreenFunction> cache_;
  std::size_t cached_entries_ = 0;

  std::size_t pending_k_ = 0;
  double pending_value_ = 0.0;
};

}  // namespace shic
