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

#include "shic/tonal.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace shic {

Quantizer::Quantizer(int q) : q_(q) {
  if (q < 2 || q > 256) throw InvalidArgument("quantizer: q must lie in [2, 256]");
}

int Quantizer::level(double f) const {
  const double c = std::clamp(f, 0.0, 255.0);
  return std::min(static_cast<int>(std::floor(c * q_ / 256.0)), q_ - 1);
}

double Quantizer::value(int level) const {
  if (level < 0 || level >= q_) throw InvalidArgument("dequantize: level out of range");
  return std::min((level + 0.5) * 256.0 / q_, 255.0);
}

TonalState::TonalState(std::vector<Point> positions, std::vector<int> levels, int q,
                       double sigma, GrayImage truth)
    : positions_(std::move(positions)),
      levels_(std::move(levels)),
      quantizer_(q),
      kernel_(sigma),
      truth_(std::move(truth)) {
  if (positions_.size() != levels_.size() || positions_.empty()) {
    throw InvalidArgument("TonalState: positions and levels must be non-empty and aligned");
  }
  values_.resize(levels_.size());
  for (std::size_t i = 0; i < levels_.size(); ++i) values_[i] = quantizer_.value(levels_[i]);
  rebuild();
}

void TonalState::rebuild() {
  maps_ = accumulate(positions_, values_, kernel_, width(), height());
}

GrayImage TonalState::reconstruction() const { return normalize(maps_, hole_fill(values_)); }

double TonalState::mse() const { return shic::mse(reconstruction(), truth_); }

void TonalState::set_level(std::size_t i, int level) {
  const double old_value = values_[i];
  const double new_value = quantizer_.value(level);
  levels_[i] = level;
  values_[i] = new_value;
  const double delta = new_value - old_value;
  if (delta == 0.0) return;
  const Point p = positions_[i];
  const int h = kernel_.half();
  const int x0 = std::max(0, p.x - h), x1 = std::min(width() - 1, p.x + h);
  const int y0 = std::max(0, p.y - h), y1 = std::min(height() - 1, p.y + h);
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) maps_.v(y, x) += kernel_(x - p.x, y - p.y) * delta;
  }
}

double TonalState::drift() const {
  const AccumulationMaps fresh = accumulate(positions_, values_, kernel_, width(), height());
  return std::max((fresh.v - maps_.v).abs().maxCoeff(), (fresh.w - maps_.w).abs().maxCoeff());
}

namespace {

struct Window {
  int x0, x1, y0, y1;
};

Window window_of(const TonalState& s, std::size_t i) {
  const Point p = s.positions()[i];
  const int h = s.kernel().half();
  return {std::max(0, p.x - h), std::min(s.width() - 1, p.x + h), std::max(0, p.y - h),
          std::min(s.height() - 1, p.y + h)};
}

}  // namespace

double tonal_error_iso(const TonalState& state, std::size_t i, double candidate) {
  const Point p = state.positions()[i];
  const double shift = candidate - state.values()[i];
  const Window win = window_of(state, i);
  const auto& maps = state.maps();
  double err = 0.0;
  for (int y = win.y0; y <= win.y1; ++y) {
    for (int x = win.x0; x <= win.x1; ++x) {
      const double w = maps.w(y, x);
      const double e = state.truth()(y, x) - (maps.v(y, x) + state.kernel()(x - p.x, y - p.y) * shift) / w;
      err += e * e;
    }
  }
  return err;
}

double tonal_closed_form_iso(const TonalState& state, std::size_t i) {
  const Point p = state.positions()[i];
  const double old_value = state.values()[i];
  const Window win = window_of(state, i);
  const auto& maps = state.maps();
  double num = 0.0, den = 0.0;
  for (int y = win.y0; y <= win.y1; ++y) {
    for (int x = win.x0; x <= win.x1; ++x) {
      const double w = maps.w(y, x);
      const double g = state.kernel()(x - p.x, y - p.y);
      num += g / w * (state.truth()(y, x) - (maps.v(y, x) - g * old_value) / w);
      den += g * g / (w * w);
    }
  }
  assert(den > 0.0);
  return num / den;
}

TonalIsoReport tonal_optimize_iso(TonalState& state, int sweeps) {
  TonalIsoReport report;
  const Quantizer& quant = state.quantizer();
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    for (std::size_t i = 0; i < state.positions().size(); ++i) {
      const int level = quant.level(tonal_closed_form_iso(state, i));
      if (level == state.levels()[i]) continue;
      const double before = tonal_error_iso(state, i, state.values()[i]);
      const double after = tonal_error_iso(state, i, quant.value(level));
      if (after <= before) {
        state.set_level(i, level);
        ++report.committed;
      } else {
        ++report.rejected;
      }
    }
    state.rebuild();
  }
  return report;
}

}  // namespace shic
