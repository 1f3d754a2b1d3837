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

namespace shic {

// Static-model range coder (32-bit carry-less, byte renormalisation) and an
// adaptive binary arithmetic coder with 12-bit probabilities.

/// Symbol frequencies for the static coder: every count >= 1, total <= 2^16.
struct FrequencyTable {
  std::vector<std::uint32_t> counts;
  std::vector<std::uint32_t> cumulative;  // size q + 1
  std::uint32_t total = 0;

  int alphabet() const { return static_cast<int>(counts.size()); }
  /// Cross-entropy of `symbols` under this table, in bits.
  double cost_bits(std::span<const int> symbols) const;
};

inline constexpr std::uint32_t kMaxTotal = 1u << 16;

/// Histogram + 1, rescaled so that the total fits in 16 bits.
FrequencyTable build_table(std::span<const int> symbols, int q);
/// Table from explicit counts (as stored in a container).
FrequencyTable table_from_counts(std::vector<std::uint32_t> counts);

std::vector<std::uint8_t> range_encode(std::span<const int> symbols, const FrequencyTable& table);
std::vector<int> range_decode(std::span<const std::uint8_t> bytes, std::size_t count,
                              const FrequencyTable& table);

/// Adaptive probability of a 1 bit per context, 12-bit fixed point.
class AdaptiveBitModel {
 public:
  static constexpr int kBits = 12;
  static constexpr int kShift = 5;

  explicit AdaptiveBitModel(int order);

  int order() const { return order_; }
  /// Probability (scaled by 4096) that the next bit is 1.
  std::uint32_t p1() const { return probs_[context_]; }
  void update(int bit);

 private:
  int order_;
  std::uint32_t context_ = 0;
  std::vector<std::uint32_t> probs_;
};

class BinaryEncoder {
 public:
  void encode(int bit, std::uint32_t p1);
  std::vector<std::uint8_t> finish();

 private:
  std::uint32_t x1_ = 0;
  std::uint32_t x2_ = 0xffffffffu;
  std::vector<std::uint8_t> out_;
};

class BinaryDecoder {
 public:
  explicit BinaryDecoder(std::span<const std::uint8_t> bytes);
  int decode(std::uint32_t p1);

 private:
  std::uint8_t next_byte();

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
  std::uint32_t x1_ = 0;
  std::uint32_t x2_ = 0xffffffffu;
  std::uint32_t x_ = 0;
};

std::vector<std::uint8_t> bit_encode(std::span<const std::uint8_t> bits, int model_order);
std::vector<std::uint8_t> bit_decode(std::span<const std::uint8_t> bytes, std::size_t count,
                                     int model_order);

/// Values of `width` bits (1 to 8), most significant bit first. Each bit is
/// coded with an adaptive probability chosen by the bits already sent for the
/// current value and by the whole previous value, so level streams get an
/// order-1 symbol context instead of a window over raw bits.
std::vector<std::uint8_t> field_encode(std::span<const int> values, int width);
std::vector<int> field_decode(std::span<const std::uint8_t> bytes, std::size_t count, int width);

/// Fixed-width big-endian bit fields of `width` bits per value.
std::vector<std::uint8_t> to_bit_fields(std::span<const int> values, int width);
std::vector<int> from_bit_fields(std::span<const std::uint8_t> bits, int width);

/// Number of bits needed for values in {0, ..., q - 1}: ceil(log2 q).
int field_width(int q);

}  // namespace shic
