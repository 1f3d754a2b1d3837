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

namespace shic {

/// Per-thread tally of kernel weight evaluations and accumulations. Used as a
/// hardware-independent cost measure by the scaling study.
class OpCounter {
 public:
  static std::uint64_t value() { return count_; }
  static void reset() { count_ = 0; }
  static void add(std::uint64_t n) { count_ += n; }

 private:
  static thread_local std::uint64_t count_;
};

}  // namespace shic
