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
#include <map>

namespace shic {

struct GoldenResult {
  double x = 0.0;
  double value = 0.0;
  int evaluations = 0;
};

/// Golden-section minimisation of f on [lo, hi] with a fixed number of
/// interval reductions. Both end points are probed as well, and the best
/// point seen is returned, so optima on the boundary are not lost.
template <typename F>
GoldenResult golden_section(F&& f, double lo, double hi, int iterations) {
  constexpr double kInvPhi = 0.6180339887498949;
  GoldenResult best;
  auto probe = [&](double x) {
    const double v = f(x);
    ++best.evaluations;
    if (best.evaluations == 1 || v < best.value) {
      best.value = v;
      best.x = x;
    }
    return v;
  };
  probe(lo);
  if (hi <= lo) return best;
  probe(hi);
  double a = lo, b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = probe(c);
  double fd = probe(d);
  for (int i = 0; i < iterations; ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = probe(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = probe(d);
    }
  }
  return best;
}

/// Memoising wrapper for objectives over a rounded (integer) argument.
template <typename F>
class IntegerMemo {
 public:
  explicit IntegerMemo(F f) : f_(std::move(f)) {}

  double operator()(double x) {
    const long key = std::lround(x);
    auto it = cache_.find(key);
    if (it == cache_.end()) it = cache_.emplace(key, f_(static_cast<int>(key))).first;
    return it->second;
  }

 private:
  F f_;
  std::map<long, double> cache_;
};

}  // namespace shic
