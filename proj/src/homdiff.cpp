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

#include "shic/homdiff.hpp"

#include <algorithm>
#include <cmath>

#include "shic/ops.hpp"
#include "shic/shepard.hpp"

namespace shic {

LaplaceSystem::LaplaceSystem(std::span<const Point> positions, int width, int height)
    : w_(width), h_(height), positions_(positions.begin(), positions.end()) {
  const int n = w_ * h_;
  unknown_of_.assign(n, -1);
  mask_of_.assign(n, -1);
  for (std::size_t k = 0; k < positions_.size(); ++k) {
    mask_of_[positions_[k].y * w_ + positions_[k].x] = static_cast<int>(k);
  }
  for (int i = 0; i < n; ++i) {
    if (mask_of_[i] < 0) {
      unknown_of_[i] = static_cast<int>(pixel_of_.size());
      pixel_of_.push_back(i);
    }
  }
  nbr_.resize(pixel_of_.size());
  fixed_.resize(pixel_of_.size());
  degree_.resize(pixel_of_.size());
  for (std::size_t u = 0; u < pixel_of_.size(); ++u) {
    const int i = pixel_of_[u];
    const int x = i % w_, y = i / w_;
    const int cand[4] = {x > 0 ? i - 1 : -1, x < w_ - 1 ? i + 1 : -1, y > 0 ? i - w_ : -1,
                         y < h_ - 1 ? i + w_ : -1};
    int deg = 0;
    for (int d = 0; d < 4; ++d) {
      nbr_[u][d] = -1;
      fixed_[u][d] = -1;
      if (cand[d] < 0) continue;
      ++deg;
      if (unknown_of_[cand[d]] >= 0) {
        nbr_[u][d] = unknown_of_[cand[d]];
      } else {
        fixed_[u][d] = mask_of_[cand[d]];
      }
    }
    degree_[u] = deg;
  }
}

Eigen::VectorXd LaplaceSystem::rhs(std::span<const double> values) const {
  Eigen::VectorXd b(unknowns());
  for (Eigen::Index u = 0; u < unknowns(); ++u) {
    double s = 0.0;
    for (int d = 0; d < 4; ++d) {
      if (fixed_[u][d] >= 0) s += values[fixed_[u][d]];
    }
    b(u) = s;
  }
  return b;
}

std::vector<double> LaplaceSystem::rhs_adjoint(const Eigen::VectorXd& y) const {
  std::vector<double> out(positions_.size(), 0.0);
  for (Eigen::Index u = 0; u < unknowns(); ++u) {
    for (int d = 0; d < 4; ++d) {
      if (fixed_[u][d] >= 0) out[fixed_[u][d]] += y(u);
    }
  }
  return out;
}

void LaplaceSystem::apply(const Eigen::VectorXd& x, Eigen::VectorXd& out) const {
  out.resize(unknowns());
  for (Eigen::Index u = 0; u < unknowns(); ++u) {
    double s = degree_[u] * x(u);
    for (int d = 0; d < 4; ++d) {
      if (nbr_[u][d] >= 0) s -= x(nbr_[u][d]);
    }
    out(u) = s;
  }
  OpCounter::add(static_cast<std::uint64_t>(unknowns()) * 5);
}

Eigen::VectorXd LaplaceSystem::gather(const GrayImage& img) const {
  Eigen::VectorXd x(unknowns());
  for (Eigen::Index u = 0; u < unknowns(); ++u) x(u) = img.data()[pixel_of_[u]];
  return x;
}

GrayImage LaplaceSystem::scatter(const Eigen::VectorXd& x, std::span<const double> values) const {
  GrayImage img(h_, w_);
  for (Eigen::Index u = 0; u < unknowns(); ++u) img.data()[pixel_of_[u]] = x(u);
  for (std::size_t k = 0; k < positions_.size(); ++k) {
    img(positions_[k].y, positions_[k].x) = values[k];
  }
  return img;
}

CgStats conjugate_gradient(const LaplaceSystem& sys, const Eigen::VectorXd& b,
                           Eigen::VectorXd& x, const SolverConfig& config) {
  CgStats stats;
  if (sys.unknowns() == 0) {
    stats.converged = true;
    return stats;
  }
  const double bnorm = b.norm();
  const double denom = bnorm > 0.0 ? bnorm : 1.0;
  Eigen::VectorXd ap;
  sys.apply(x, ap);
  Eigen::VectorXd r = b - ap;
  double rr = r.squaredNorm();
  stats.residual = std::sqrt(rr) / denom;
  if (stats.residual <= config.tolerance) {
    stats.converged = true;
    return stats;
  }
  Eigen::VectorXd p = r;
  while (stats.iterations < config.max_iterations) {
    sys.apply(p, ap);
    const double pap = p.dot(ap);
    if (!(pap > 0.0)) break;
    const double alpha = rr / pap;
    x += alpha * p;
    r -= alpha * ap;
    const double rr_next = r.squaredNorm();
    ++stats.iterations;
    stats.residual = std::sqrt(rr_next) / denom;
    if (stats.residual <= config.tolerance) {
      stats.converged = true;
      break;
    }
    p = r + (rr_next / rr) * p;
    rr = rr_next;
  }
  return stats;
}

HomResult inpaint_hom(std::span<const Point> positions, std::span<const double> values,
                      int width, int height, const SolverConfig& config,
                      const GrayImage* initial) {
  if (positions.empty()) throw InvalidArgument("inpaint_hom: empty mask");
  if (!(config.tolerance > 0.0)) throw InvalidArgument("inpaint_hom: tolerance must be positive");
  const LaplaceSystem sys(positions, width, height);
  Eigen::VectorXd x = initial ? sys.gather(*initial)
                              : Eigen::VectorXd::Constant(sys.unknowns(), hole_fill(values));
  const CgStats stats = conjugate_gradient(sys, sys.rhs(values), x, config);
  return {sys.scatter(x, values), stats.iterations, stats.residual, stats.converged};
}

namespace {

// Reconstruction as a linear map of the mask values g:
//   A g = [g on the mask; L^-1 B g elsewhere],   A^T e = e_mask + B^T L^-1 e_rest
// (L is symmetric). The normal equations A^T A g = A^T f are solved by CG.
class HomOperator {
 public:
  HomOperator(const LaplaceSystem& sys, std::span<const Point> positions, const SolverConfig& inner)
      : sys_(sys), positions_(positions), inner_(inner), warm_fwd_(Eigen::VectorXd::Zero(sys.unknowns())),
        warm_adj_(Eigen::VectorXd::Zero(sys.unknowns())) {}

  GrayImage forward(std::span<const double> g) {
    conjugate_gradient(sys_, sys_.rhs(g), warm_fwd_, inner_);
    return sys_.scatter(warm_fwd_, g);
  }

  std::vector<double> adjoint(const GrayImage& e) {
    conjugate_gradient(sys_, sys_.gather(e), warm_adj_, inner_);
    std::vector<double> out = sys_.rhs_adjoint(warm_adj_);
    for (std::size_t k = 0; k < positions_.size(); ++k) {
      out[k] += e(positions_[k].y, positions_[k].x);
    }
    return out;
  }

 private:
  const LaplaceSystem& sys_;
  std::span<const Point> positions_;
  SolverConfig inner_;
  // Successive solves see slowly changing right-hand sides.
  Eigen::VectorXd warm_fwd_, warm_adj_;
};

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

LeastSquaresReport tonal_optimize_hom_ls(std::span<const Point> positions,
                                         std::span<const double> values, const GrayImage& truth,
                                         int max_iterations, double tolerance,
                                         const SolverConfig& inner) {
  if (positions.empty() || positions.size() != values.size()) {
    throw InvalidArgument("tonal_optimize_hom_ls: need matching, non-empty positions and values");
  }
  const LaplaceSystem sys(positions, width(truth), height(truth));
  HomOperator op(sys, positions, inner);
  const std::size_t n = values.size();

  LeastSquaresReport report;
  report.values.assign(values.begin(), values.end());
  const GrayImage recon = op.forward(report.values);
  report.mse_before = mse(recon, truth);

  // CGNR: r = A^T (f - A g), p = r; z = A p; alpha = |r|^2 / |z|^2.
  std::vector<double> r = op.adjoint(truth - recon);
  std::vector<double> p = r;
  double rr = dot(r, r);
  const double rr0 = rr;
  while (report.iterations < max_iterations && rr > tolerance * tolerance * rr0 && rr > 0.0) {
    const GrayImage z = op.forward(p);
    const double zz = z.square().sum();
    if (!(zz > 0.0)) break;
    const double alpha = rr / zz;
    for (std::size_t k = 0; k < n; ++k) report.values[k] += alpha * p[k];
    const std::vector<double> az = op.adjoint(z);
    for (std::size_t k = 0; k < n; ++k) r[k] -= alpha * az[k];
    const double rr_next = dot(r, r);
    for (std::size_t k = 0; k < n; ++k) p[k] = r[k] + (rr_next / rr) * p[k];
    rr = rr_next;
    ++report.iterations;
  }
  // Drop accumulated drift: report the error of a fresh solve.
  report.mse_after = mse(inpaint_hom(positions, report.values, width(truth), height(truth),
                                     {inner.tolerance, inner.max_iterations})
                             .image,
                         truth);
  return report;
}

HomGlobalModel::HomGlobalModel(std::span<const Point> positions, std::span<const double> values,
                               GrayImage truth, SolverConfig config)
    : sys_(positions, width(truth), height(truth)),
      values_(values.begin(), values.end()),
      truth_(std::move(truth)),
      config_(config) {
  x_ = Eigen::VectorXd::Constant(sys_.unknowns(), hole_fill(values_));
  conjugate_gradient(sys_, sys_.rhs(values_), x_, config_);
  image_ = sys_.scatter(x_, values_);
  sse_ = (image_ - truth_).square().sum();
}

double HomGlobalModel::trial(std::size_t k, double value) {
  std::vector<double> candidate = values_;
  candidate[k] = value;
  pending_x_ = x_;
  conjugate_gradient(sys_, sys_.rhs(candidate), pending_x_, config_);
  pending_image_ = sys_.scatter(pending_x_, candidate);
  pending_k_ = k;
  pending_value_ = value;
  pending_sse_ = (pending_image_ - truth_).square().sum();
  return pending_sse_ - sse_;
}

void HomGlobalModel::commit() {
  values_[pending_k_] = pending_value_;
  x_ = std::move(pending_x_);
  image_ = std::move(pending_image_);
  sse_ = pending_sse_;
}

HomLocalModel::HomLocalModel(std::span<const Point> positions, std::span<const double> values,
                             GrayImage truth, int radius, SolverConfig config)
    : positions_(positions.begin(), positions.end()),
      values_(values.begin(), values.end()),
      truth_(std::move(truth)),
      radius_(radius),
      config_(config),
      sys_(positions, width(truth_), height(truth_)) {
  is_mask_ = BoolPlane::Constant(truth_.rows(), truth_.cols(), false);
  for (const Point& p : positions_) is_mask_(p.y, p.x) = true;
  x_ = Eigen::VectorXd::Constant(sys_.unknowns(), hole_fill(values_));
  conjugate_gradient(sys_, sys_.rhs(values_), x_, config_);
  image_ = sys_.scatter(x_, values_);
  cache_.resize(positions_.size());
}

void HomLocalModel::green(std::size_t k) {
  const int w = width(truth_), h = height(truth_);
  const Point pk = positions_[k];
  // Window plus a one-pixel Dirichlet ring wherever the window is interior.
  const int x0 = std::max(0, pk.x - radius_ - 1), x1 = std::min(w - 1, pk.x + radius_ + 1);
  const int y0 = std::max(0, pk.y - radius_ - 1), y1 = std::min(h - 1, pk.y + radius_ + 1);
  const int sw = x1 - x0 + 1, sh = y1 - y0 + 1;
  std::vector<Point> fixed;
  std::vector<double> fixed_values;
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const bool ring = (x == x0 && x0 > 0) || (x == x1 && x1 < w - 1) ||
                        (y == y0 && y0 > 0) || (y == y1 && y1 < h - 1);
      if (ring || is_mask_(y, x)) {
        fixed.push_back({x - x0, y - y0});
        fixed_values.push_back(x == pk.x && y == pk.y ? 1.0 : 0.0);
      }
    }
  }
  const LaplaceSystem local(fixed, sw, sh);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(local.unknowns());
  SolverConfig tight = config_;
  tight.tolerance = 1e-10;
  conjugate_gradient(local, local.rhs(fixed_values), g, tight);
  const GrayImage field = local.scatter(g, fixed_values);
  GreenFunction& out = cache_[k];
  out.pixels.clear();
  out.values.clear();
  for (int y = 0; y < sh; ++y) {
    for (int x = 0; x < sw; ++x) {
      // Far tails are dropped; the end-of-sweep re-solve absorbs them.
      if (std::abs(field(y, x)) > kGreenCutoff) {
        out.pixels.push_back((y + y0) * w + (x + x0));
        out.values.push_back(field(y, x));
      }
    }
  }
  cached_entries_ += out.pixels.size();
}

const HomLocalModel::GreenFunction& HomLocalModel::green_of(std::size_t k) {
  if (!cache_[k].pixels.empty()) return cache_[k];
  if (cached_entries_ > kMaxCachedEntries) {
    for (auto& g : cache_) {
      g.pixels = {};
      g.values = {};
    }
    cached_entries_ = 0;
  }
  green(k);
  return cache_[k];
}

double HomLocalModel::trial(std::size_t k, double value) {
  const GreenFunction& g = green_of(k);
  const double delta = value - values_[k];
  double change = 0.0;
  for (std::size_t i = 0; i < g.pixels.size(); ++i) {
    const int p = g.pixels[i];
    const double e = image_.data()[p] - truth_.data()[p];
    const double e2 = e + delta * g.values[i];
    change += e2 * e2 - e * e;
  }
  pending_k_ = k;
  pending_value_ = value;
  return change;
}

void HomLocalModel::commit() {
  const double delta = pending_value_ - values_[pending_k_];
  const GreenFunction& g = green_of(pending_k_);
  for (std::size_t i = 0; i < g.pixels.size(); ++i) {
    image_.data()[g.pixels[i]] += delta * g.values[i];
  }
  values_[pending_k_] = pending_value_;
  const Point p = positions_[pending_k_];
  image_(p.y, p.x) = pending_value_;
}

void HomLocalModel::end_sweep() {
  x_ = sys_.gather(image_);
  conjugate_gradient(sys_, sys_.rhs(values_), x_, config_);
  image_ = sys_.scatter(x_, values_);
}

}  // namespace shic
