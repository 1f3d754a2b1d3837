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

#include "shic/trial.hpp"

#include <algorithm>
#include <cmath>

#include "shic/ops.hpp"

namespace shic {

std::uint64_t bounded_random(std::mt19937_64& rng, std::uint64_t n) {
  if (n <= 1) return 0;
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t r;
  do {
    r = rng();
  } while (r >= limit);
  return r % n;
}

std::vector<std::size_t> seeded_permutation(std::size_t n, std::mt19937_64& rng) {
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = bounded_random(rng, i);
    std::swap(perm[i - 1], perm[j]);
  }
  return perm;
}

FullReinpaintModel::FullReinpaintModel(std::vector<double> values, InpaintFn inpaint,
                                       GrayImage truth)
    : values_(std::move(values)), inpaint_(std::move(inpaint)), truth_(std::move(truth)) {
  current_ = inpaint_(values_);
  sse_ = (current_ - truth_).square().sum();
}

double FullReinpaintModel::trial(std::size_t k, double value) {
  std::vector<double> candidate = values_;
  candidate[k] = value;
  pending_ = inpaint_(candidate);
  pending_k_ = k;
  pending_value_ = value;
  pending_sse_ = (pending_ - truth_).square().sum();
  return pending_sse_ - sse_;
}

void FullReinpaintModel::commit() {
  values_[pending_k_] = pending_value_;
  current_ = std::move(pending_);
  sse_ = pending_sse_;
}

std::vector<int> tonal_optimize_trial(std::vector<int> levels,
                                      const FullReinpaintModel::InpaintFn& inpaint, int q,
                                      const GrayImage& truth, int sweeps, std::uint64_t seed) {
  const Quantizer quant(q);
  std::vector<double> values(levels.size());
  for (std::size_t i = 0; i < levels.size(); ++i) values[i] = quant.value(levels[i]);
  FullReinpaintModel model(std::move(values), inpaint, truth);
  tonal_optimize_trial(model, levels, quant, sweeps, seed);
  return levels;
}

ShepardTrialModel::ShepardTrialModel(std::span<const Point> positions,
                                     std::span<const double> values,
                                     std::span<const double> sigmas, double lambda,
                                     GrayImage truth)
    : w_(width(truth)),
      h_(height(truth)),
      positions_(positions.begin(), positions.end()),
      values_(values.begin(), values.end()),
      sigmas_(sigmas.begin(), sigmas.end()),
      lambda_(lambda),
      aniso_(!std::isinf(lambda)),
      truth_(std::move(truth)),
      index_(positions_, h_) {
  if (positions_.empty()) throw InvalidArgument("ShepardTrialModel: empty mask");
  fill_ = hole_fill(values_);

  if (aniso_) {
    pass1_kernel_ = IsoKernel(compute_sigma(positions_.size(), w_, h_));
    pass1_ = accumulate(positions_, values_, pass1_kernel_, w_, h_);
    u1_ = normalize(pass1_, fill_);
    BoolPlane hole = pass1_.w == 0.0;
    for (int i = 0; i < hole.size(); ++i) {
      if (hole.data()[i]) pass1_holes_.push_back(i);
    }
    if (!pass1_holes_.empty()) {
      for (std::size_t k = 0; k < positions_.size(); ++k) {
        const Point p = positions_[k];
        const int x0 = std::max(0, p.x - 1), x1 = std::min(w_ - 1, p.x + 1);
        const int y0 = std::max(0, p.y - 1), y1 = std::min(h_ - 1, p.y + 1);
        if (hole.block(y0, x0, y1 - y0 + 1, x1 - x0 + 1).any()) hole_dependent_.push_back(k);
      }
    }
    kernels_ = oriented_kernels(positions_, sigmas_, lambda_, u1_);
  } else {
    kernels_.reserve(positions_.size());
    for (double s : sigmas_) kernels_.push_back(isotropic_kernel(s));
  }
  for (const auto& k : kernels_) max_half_ = std::max(max_half_, k.half);

  pass3_ = accumulate_oriented(positions_, values_, kernels_, w_, h_);
  u3_ = normalize(pass3_, fill_);
  for (int i = 0; i < pass3_.w.size(); ++i) {
    if (pass3_.w.data()[i] == 0.0) {
      pass3_holes_.push_back(i);
      const double f = truth_.data()[i];
      hole_sum_f_ += f;
      hole_sum_f2_ += f * f;
    }
  }
  sse_ = (u3_ - truth_).square().sum();

  pass1_stamp_ = Plane<int>::Zero(h_, w_);
  pass1_tmp_ = GrayImage::Zero(h_, w_);
  pass3_stamp_ = Plane<int>::Zero(h_, w_);
  pass3_tmp_v_ = GrayImage::Zero(h_, w_);
  pass3_tmp_w_ = GrayImage::Zero(h_, w_);
  kernel_stamp_.assign(positions_.size(), 0);
  kernel_slot_.assign(positions_.size(), 0);
  kernel_tmp_.resize(positions_.size());

  std::size_t total = 0;
  table_offset_.resize(positions_.size());
  for (std::size_t j = 0; j < positions_.size(); ++j) {
    table_offset_[j] = total;
    total += static_cast<std::size_t>((2 * kernels_[j].half + 1) * (2 * kernels_[j].half + 1));
  }
  cached_ = total <= kMaxCachedWeights;
  if (cached_) {
    tables_.resize(total);
    for (std::size_t j = 0; j < positions_.size(); ++j) {
      fill_table(kernels_[j], tables_.data() + table_offset_[j]);
    }
  }
}

double ShepardTrialModel::fill_value(std::size_t k, double value) const {
  if (pass1_holes_.empty() && pass3_holes_.empty()) return fill_;
  double sum = 0.0;
  for (std::size_t j = 0; j < values_.size(); ++j) sum += j == k ? value : values_[j];
  return sum / static_cast<double>(values_.size());
}

double ShepardTrialModel::hole_sse(double fill) const {
  const double u = std::clamp(fill, 0.0, 255.0);
  const double n = static_cast<double>(pass3_holes_.size());
  return n * u * u - 2.0 * u * hole_sum_f_ + hole_sum_f2_;
}

void ShepardTrialModel::fill_table(const OrientedKernel& ker, double* out) const {
  const int half = ker.half;
  for (int dy = -half; dy <= half; ++dy) {
    for (int dx = -half; dx <= half; ++dx) *out++ = oriented_weight(ker, dx, dy);
  }
}

double ShepardTrialModel::trial(std::size_t k, double value) {
  ++trial_id_;
  pending_k_ = k;
  pending_value_ = value;
  pending_fill_ = fill_value(k, value);
  changed_.clear();
  new_weights_.clear();
  new_offset_.clear();
  region_.clear();
  pass1_updates_.clear();
  pass3_updates_.clear();
  auto value_of = [&](std::size_t j) { return j == k ? value : values_[j]; };
  std::uint64_t ops = 0;

  if (aniso_) {
    // Pass 1 inside the window of k, scattered in canonical order so every
    // pixel sums its terms in the same order as a full accumulation.
    const Point pk = positions_[k];
    const int h0 = pass1_kernel_.half();
    const int x0 = std::max(0, pk.x - h0), x1 = std::min(w_ - 1, pk.x + h0);
    const int y0 = std::max(0, pk.y - h0), y1 = std::min(h_ - 1, pk.y + h0);
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) pass1_tmp_(y, x) = 0.0;
    }
    index_.for_each_in_rect(x0 - h0, x1 + h0, y0 - h0, y1 + h0, [&](int j) {
      const Point pj = positions_[j];
      const double f = value_of(static_cast<std::size_t>(j));
      const int ya = std::max(y0, pj.y - h0), yb = std::min(y1, pj.y + h0);
      const int xa = std::max(x0, pj.x - h0), xb = std::min(x1, pj.x + h0);
      for (int y = ya; y <= yb; ++y) {
        for (int x = xa; x <= xb; ++x) pass1_tmp_(y, x) += pass1_kernel_(x - pj.x, y - pj.y) * f;
      }
    });
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        const double v = pass1_tmp_(y, x);
        const double u = std::clamp(v / pass1_.w(y, x), 0.0, 255.0);
        pass1_stamp_(y, x) = trial_id_;
        pass1_tmp_(y, x) = u;
        pass1_updates_.push_back({y * w_ + x, v, u});
      }
    }
    ops += pass1_updates_.size();
    const double pass1_fill = std::clamp(pending_fill_, 0.0, 255.0);
    const bool fill_moved = !pass1_holes_.empty() && pending_fill_ != fill_;
    auto sample = [&](int x, int y) {
      if (pass1_stamp_(y, x) == trial_id_) return pass1_tmp_(y, x);
      if (fill_moved && pass1_.w(y, x) == 0.0) return pass1_fill;
      return u1_(y, x);
    };
    auto refresh = [&](std::size_t j) {
      if (kernel_stamp_[j] == trial_id_) return;
      double fx, fy;
      gradient_at(sample, w_, h_, positions_[j].x, positions_[j].y, fx, fy);
      const OrientedKernel kn = kernel_from_gradient(fx, fy, sigmas_[j], lambda_);
      if (kn == kernels_[j] && j != k) return;
      kernel_stamp_[j] = trial_id_;
      kernel_tmp_[j] = kn;
      changed_.push_back(j);
    };
    index_.for_each_in_box(pk.x, pk.y, h0 + 1, h0 + 1,
                           [&](int j) { refresh(static_cast<std::size_t>(j)); });
    if (fill_moved) {
      for (std::size_t j : hole_dependent_) refresh(j);
    }
    if (kernel_stamp_[k] != trial_id_) {
      kernel_stamp_[k] = trial_id_;
      kernel_tmp_[k] = kernels_[k];
      changed_.push_back(k);
    }
  } else {
    kernel_stamp_[k] = trial_id_;
    kernel_tmp_[k] = kernels_[k];
    changed_.push_back(k);
  }

  // Weights of the kernels that changed; untouched kernels read their tables.
  int bx0 = w_, bx1 = -1, by0 = h_, by1 = -1;
  for (std::size_t j : changed_) {
    const OrientedKernel& ker = kernel_tmp_[j];
    new_offset_.push_back(new_weights_.size());
    new_weights_.resize(new_weights_.size() +
                        static_cast<std::size_t>((2 * ker.half + 1) * (2 * ker.half + 1)));
    fill_table(ker, new_weights_.data() + new_offset_.back());
    kernel_slot_[j] = static_cast<int>(new_offset_.size() - 1);

    const Point p = positions_[j];
    const int x0 = std::max(0, p.x - ker.half), x1 = std::min(w_ - 1, p.x + ker.half);
    const int y0 = std::max(0, p.y - ker.half), y1 = std::min(h_ - 1, p.y + ker.half);
    bx0 = std::min(bx0, x0);
    bx1 = std::max(bx1, x1);
    by0 = std::min(by0, y0);
    by1 = std::max(by1, y1);
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        if (pass3_stamp_(y, x) == trial_id_) continue;
        pass3_stamp_(y, x) = trial_id_;
        region_.push_back(y * w_ + x);
        pass3_tmp_v_(y, x) = 0.0;
        pass3_tmp_w_(y, x) = 0.0;
      }
    }
  }

  index_.for_each_in_rect(bx0 - max_half_, bx1 + max_half_, by0 - max_half_, by1 + max_half_,
                          [&](int jj) {
    const auto j = static_cast<std::size_t>(jj);
    const bool fresh = kernel_stamp_[j] == trial_id_;
    const int half = kernels_[j].half;
    const Point pj = positions_[j];
    const int ya = std::max(by0, pj.y - half), yb = std::min(by1, pj.y + half);
    const int xa = std::max(bx0, pj.x - half), xb = std::min(bx1, pj.x + half);
    if (ya > yb || xa > xb) return;
    const double f = value_of(j);
    const int side = 2 * half + 1;
    const double* table = nullptr;
    if (fresh) {
      table = new_weights_.data() + new_offset_[static_cast<std::size_t>(kernel_slot_[j])];
    } else if (cached_) {
      table = tables_.data() + table_offset_[j];
    }
    for (int y = ya; y <= yb; ++y) {
      for (int x = xa; x <= xb; ++x) {
        if (pass3_stamp_(y, x) != trial_id_) continue;
        const int dx = x - pj.x, dy = y - pj.y;
        const double g = table ? table[(dy + half) * side + dx + half]
                               : oriented_weight(kernels_[j], dx, dy);
        pass3_tmp_w_(y, x) += g;
        pass3_tmp_v_(y, x) += g * f;
        ++ops;
      }
    }
  });

  double delta = 0.0;
  for (int pixel : region_) {
    const double v = pass3_tmp_v_.data()[pixel];
    const double w = pass3_tmp_w_.data()[pixel];
    const double u = std::clamp(v / w, 0.0, 255.0);
    const double f = truth_.data()[pixel];
    const double before = u3_.data()[pixel] - f;
    delta += (u - f) * (u - f) - before * before;
    pass3_updates_.push_back({pixel, v, w, u});
  }
  if (!pass3_holes_.empty() && pending_fill_ != fill_) {
    delta += hole_sse(pending_fill_) - hole_sse(fill_);
  }
  OpCounter::add(ops);
  pending_delta_ = delta;
  return delta;
}

void ShepardTrialModel::commit() {
  for (const auto& up : pass1_updates_) {
    pass1_.v.data()[up.pixel] = up.v;
    u1_.data()[up.pixel] = up.u;
  }
  if (pending_fill_ != fill_) {
    const double fill = std::clamp(pending_fill_, 0.0, 255.0);
    for (int pixel : pass1_holes_) u1_.data()[pixel] = fill;
    for (int pixel : pass3_holes_) u3_.data()[pixel] = fill;
  }
  for (std::size_t n = 0; n < changed_.size(); ++n) {
    const std::size_t j = changed_[n];
    kernels_[j] = kernel_tmp_[j];
    if (cached_) {
      const std::size_t len = static_cast<std::size_t>((2 * kernels_[j].half + 1) *
                                                       (2 * kernels_[j].half + 1));
      std::copy_n(new_weights_.begin() + static_cast<std::ptrdiff_t>(new_offset_[n]), len,
                  tables_.begin() + static_cast<std::ptrdiff_t>(table_offset_[j]));
    }
  }
  for (const auto& up : pass3_updates_) {
    pass3_.v.data()[up.pixel] = up.v;
    pass3_.w.data()[up.pixel] = up.w;
    u3_.data()[up.pixel] = up.u;
  }
  values_[pending_k_] = pending_value_;
  fill_ = pending_fill_;
  sse_ += pending_delta_;
  // Invalidate the scratch stamps of the committed trial.
  ++trial_id_;
}

}  // namespace shic
