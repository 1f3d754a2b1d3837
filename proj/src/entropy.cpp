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

#include "shic/entropy.hpp"

#include <algorithm>
#include <cmath>

#include "shic/error.hpp"

namespace shic {

namespace {

constexpr std::uint32_t kTop = 1u << 24;
constexpr std::uint32_t kBot = 1u << 16;

void finalize_cumulative(FrequencyTable& t) {
  t.cumulative.assign(t.counts.size() + 1, 0);
  for (std::size_t s = 0; s < t.counts.size(); ++s) {
    t.cumulative[s + 1] = t.cumulative[s] + t.counts[s];
  }
  t.total = t.cumulative.back();
}

}  // namespace

double FrequencyTable::cost_bits(std::span<const int> symbols) const {
  double bits = 0.0;
  for (int s : symbols) bits += std::log2(static_cast<double>(total) / counts[s]);
  return bits;
}

FrequencyTable build_table(std::span<const int> symbols, int q) {
  if (q < 1) throw InvalidArgument("build_table: empty alphabet");
  std::vector<std::uint64_t> hist(static_cast<std::size_t>(q), 0);
  for (int s : symbols) {
    if (s < 0 || s >= q) throw InvalidArgument("build_table: symbol outside alphabet");
    ++hist[s];
  }
  FrequencyTable t;
  t.counts.resize(hist.size());
  const std::uint64_t n = symbols.size();
  if (n + hist.size() <= kMaxTotal) {
    for (std::size_t s = 0; s < hist.size(); ++s) t.counts[s] = static_cast<std::uint32_t>(hist[s] + 1);
  } else {
    const std::uint64_t budget = kMaxTotal - hist.size();
    for (std::size_t s = 0; s < hist.size(); ++s) {
      t.counts[s] = static_cast<std::uint32_t>(1 + hist[s] * budget / n);
    }
  }
  finalize_cumulative(t);
  return t;
}

FrequencyTable table_from_counts(std::vector<std::uint32_t> counts) {
  FrequencyTable t;
  t.counts = std::move(counts);
  if (t.counts.empty()) throw ParseError(ParseError::Kind::kPayload, "frequency table is empty");
  std::uint64_t total = 0;
  for (auto c : t.counts) {
    if (c == 0) throw ParseError(ParseError::Kind::kPayload, "frequency table has a zero count");
    total += c;
  }
  if (total > kMaxTotal) throw ParseError(ParseError::Kind::kPayload, "frequency table total too large");
  finalize_cumulative(t);
  return t;
}

std::vector<std::uint8_t> range_encode(std::span<const int> symbols, const FrequencyTable& table) {
  std::vector<std::uint8_t> out;
  if (symbols.empty()) return out;
  std::uint32_t low = 0, range = 0xffffffffu;
  for (int s : symbols) {
    if (s < 0 || s >= table.alphabet()) throw InvalidArgument("range_encode: symbol outside alphabet");
    range /= table.total;
    low += table.cumulative[s] * range;
    range *= table.counts[s];
    while ((low ^ (low + range)) < kTop ||
           (range < kBot && ((range = (0u - low) & (kBot - 1)), true))) {
      out.push_back(static_cast<std::uint8_t>(low >> 24));
      low <<= 8;
      range <<= 8;
    }
  }
  for (int i = 0; i < 4; ++i) {
    out.push_back(static_cast<std::uint8_t>(low >> 24));
    low <<= 8;
  }
  return out;
}

std::vector<int> range_decode(std::span<const std::uint8_t> bytes, std::size_t count,
                              const FrequencyTable& table) {
  std::vector<int> symbols;
  symbols.reserve(count);
  if (count == 0) return symbols;
  std::size_t pos = 0;
  auto next = [&]() -> std::uint32_t {
    if (pos >= bytes.size()) throw ParseError(ParseError::Kind::kTruncated, "range stream truncated");
    return bytes[pos++];
  };
  std::uint32_t low = 0, range = 0xffffffffu, code = 0;
  for (int i = 0; i < 4; ++i) code = (code << 8) | next();
  for (std::size_t i = 0; i < count; ++i) {
    range /= table.total;
    const std::uint32_t v = std::min((code - low) / range, table.total - 1);
    const auto it = std::upper_bound(table.cumulative.begin(), table.cumulative.end(), v);
    const int s = static_cast<int>(it - table.cumulative.begin()) - 1;
    symbols.push_back(s);
    low += table.cumulative[s] * range;
    range *= table.counts[s];
    while ((low ^ (low + range)) < kTop ||
           (range < kBot && ((range = (0u - low) & (kBot - 1)), true))) {
      code = (code << 8) | (pos < bytes.size() ? bytes[pos++] : 0u);
      low <<= 8;
      range <<= 8;
    }
  }
  return symbols;
}

AdaptiveBitModel::AdaptiveBitModel(int order) : order_(order) {
  if (order < 0 || order > 16) throw InvalidArgument("AdaptiveBitModel: unsupported order");
  probs_.assign(std::size_t{1} << order, 1u << (kBits - 1));
}

void AdaptiveBitModel::update(int bit) {
  std::uint32_t& p = probs_[context_];
  if (bit) {
    p += ((1u << kBits) - p) >> kShift;
  } else {
    p -= p >> kShift;
  }
  if (order_ > 0) context_ = ((context_ << 1) | static_cast<std::uint32_t>(bit & 1)) & ((1u << order_) - 1);
}

void BinaryEncoder::encode(int bit, std::uint32_t p1) {
  const std::uint32_t xmid = x1_ + ((x2_ - x1_) >> 12) * p1;
  if (bit) {
    x2_ = xmid;
  } else {
    x1_ = xmid + 1;
  }
  while (((x1_ ^ x2_) & 0xff000000u) == 0) {
    out_.push_back(static_cast<std::uint8_t>(x2_ >> 24));
    x1_ <<= 8;
    x2_ = (x2_ << 8) | 255u;
  }
}

std::vector<std::uint8_t> BinaryEncoder::finish() {
  // Any value in [x1, x2] identifies the interval; x1's leading byte plus
  // zero padding on the decoder side does.
  out_.push_back(static_cast<std::uint8_t>(x1_ >> 24));
  out_.push_back(static_cast<std::uint8_t>(x1_ >> 16));
  out_.push_back(static_cast<std::uint8_t>(x1_ >> 8));
  out_.push_back(static_cast<std::uint8_t>(x1_));
  return std::move(out_);
}

BinaryDecoder::BinaryDecoder(std::span<const std::uint8_t> bytes) : bytes_(bytes) {
  for (int i = 0; i < 4; ++i) x_ = (x_ << 8) | next_byte();
}

std::uint8_t BinaryDecoder::next_byte() { return pos_ < bytes_.size() ? bytes_[pos_++] : 0; }

int BinaryDecoder::decode(std::uint32_t p1) {
  const std::uint32_t xmid = x1_ + ((x2_ - x1_) >> 12) * p1;
  const int bit = x_ <= xmid ? 1 : 0;
  if (bit) {
    x2_ = xmid;
  } else {
    x1_ = xmid + 1;
  }
  while (((x1_ ^ x2_) & 0xff000000u) == 0) {
    x1_ <<= 8;
    x2_ = (x2_ << 8) | 255u;
    x_ = (x_ << 8) | next_byte();
  }
  return bit;
}

std::vector<std::uint8_t> bit_encode(std::span<const std::uint8_t> bits, int model_order) {
  if (model_order < 0 || model_order > 2) throw InvalidArgument("bit_encode: order must be 0, 1 or 2");
  if (bits.empty()) return {};
  AdaptiveBitModel model(model_order);
  BinaryEncoder enc;
  for (std::uint8_t b : bits) {
    enc.encode(b & 1, model.p1());
    model.update(b & 1);
  }
  return enc.finish();
}

std::vector<std::uint8_t> bit_decode(std::span<const std::uint8_t> bytes, std::size_t count,
                                     int model_order) {
  if (model_order < 0 || model_order > 2) throw InvalidArgument("bit_decode: order must be 0, 1 or 2");
  std::vector<std::uint8_t> bits;
  if (count == 0) return bits;
  bits.reserve(count);
  AdaptiveBitModel model(model_order);
  BinaryDecoder dec(bytes);
  for (std::size_t i = 0; i < count; ++i) {
    const int b = dec.decode(model.p1());
    model.update(b);
    bits.push_back(static_cast<std::uint8_t>(b));
  }
  return bits;
}

namespace {

// Probabilities indexed by (previous value, bit-tree node); node 1 is the
// root and a node's children are 2n and 2n + 1.
class FieldModel {
 public:
  explicit FieldModel(int width) : width_(width) {
    if (width < 1 || width > 8) throw InvalidArgument("field coder: width must lie in [1, 8]");
    probs_.assign(std::size_t{1} << (2 * width), 1u << (AdaptiveBitModel::kBits - 1));
  }

  int width() const { return width_; }
  std::uint32_t& prob(int node) { return probs_[(static_cast<std::size_t>(prev_) << width_) | node]; }
  void finish_value(int value) { prev_ = value; }

  static void update(std::uint32_t& p, int bit) {
    if (bit) {
      p += ((1u << AdaptiveBitModel::kBits) - p) >> AdaptiveBitModel::kShift;
    } else {
      p -= p >> AdaptiveBitModel::kShift;
    }
  }

 private:
  int width_;
  int prev_ = 0;
  std::vector<std::uint32_t> probs_;
};

}  // namespace

std::vector<std::uint8_t> field_encode(std::span<const int> values, int width) {
  FieldModel model(width);
  if (values.empty()) return {};
  BinaryEncoder enc;
  for (int v : values) {
    if (v < 0 || v >= (1 << width)) throw InvalidArgument("field_encode: value does not fit the width");
    int node = 1;
    for (int b = width - 1; b >= 0; --b) {
      const int bit = (v >> b) & 1;
      std::uint32_t& p = model.prob(node);
      enc.encode(bit, p);
      FieldModel::update(p, bit);
      node = 2 * node + bit;
    }
    model.finish_value(v);
  }
  return enc.finish();
}

std::vector<int> field_decode(std::span<const std::uint8_t> bytes, std::size_t count, int width) {
  FieldModel model(width);
  std::vector<int> values;
  if (count == 0) return values;
  values.reserve(count);
  BinaryDecoder dec(bytes);
  for (std::size_t i = 0; i < count; ++i) {
    int node = 1;
    for (int b = 0; b < width; ++b) {
      std::uint32_t& p = model.prob(node);
      const int bit = dec.decode(p);
      FieldModel::update(p, bit);
      node = 2 * node + bit;
    }
    const int v = node - (1 << width);
    values.push_back(v);
    model.finish_value(v);
  }
  return values;
}

int field_width(int q) {
  int w = 0;
  while ((1 << w) < q) ++w;
  return std::max(w, 1);
}

std::vector<std::uint8_t> to_bit_fields(std::span<const int> values, int width) {
  std::vector<std::uint8_t> bits;
  bits.reserve(values.size() * static_cast<std::size_t>(width));
  for (int v : values) {
    for (int b = width - 1; b >= 0; --b) bits.push_back(static_cast<std::uint8_t>((v >> b) & 1));
  }
  return bits;
}

std::vector<int> from_bit_fields(std::span<const std::uint8_t> bits, int width) {
  std::vector<int> values(bits.size() / static_cast<std::size_t>(width), 0);
  for (std::size_t i = 0; i < values.size(); ++i) {
    int v = 0;
    for (int b = 0; b < width; ++b) v = (v << 1) | bits[i * width + b];
    values[i] = v;
  }
  return values;
}

}  // namespace shic
