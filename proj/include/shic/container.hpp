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
#include <string>
#include <vector>

namespace shic {

enum class CodecId : std::uint8_t { kRjip = 0, kRjipA = 1, kTreeIso = 2, kTreeAniso = 3 };

const char* codec_name(CodecId id);

inline constexpr char kMagic[4] = {'S', 'H', 'I', 'C'};
inline constexpr std::uint8_t kVersion = 1;

/// Common prefix of every .shic file.
struct ContainerHeader {
  CodecId codec = CodecId::kRjip;
  int width = 0;
  int height = 0;
  int q = 2;
};

/// Little-endian serialisation helpers.
class ByteWriter {
 public:
  void u8(std::uint32_t v) { bytes_.push_back(static_cast<std::uint8_t>(v)); }
  void u16(std::uint32_t v) {
    u8(v & 0xff);
    u8((v >> 8) & 0xff);
  }
  void u32(std::uint32_t v) {
    u16(v & 0xffff);
    u16(v >> 16);
  }
  void bytes(std::span<const std::uint8_t> b) { bytes_.insert(bytes_.end(), b.begin(), b.end()); }

  const std::vector<std::uint8_t>& data() const { return bytes_; }
  std::vector<std::uint8_t> take() { return std::move(bytes_); }

 private:
  std::vector<std::uint8_t> bytes_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint32_t u8();
  std::uint32_t u16();
  std::uint32_t u32();
  std::span<const std::uint8_t> bytes(std::size_t n);
  std::span<const std::uint8_t> rest();
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

void write_header(ByteWriter& out, const ContainerHeader& h);
/// Validates magic, version and codec id.
ContainerHeader read_header(ByteReader& in);
/// Header of an in-memory file without consuming it.
ContainerHeader peek_header(std::span<const std::uint8_t> file);

/// Fixed-point parameter storage: round(value * scale) in a u16.
std::uint16_t to_fixed(double value, double scale);
inline double from_fixed(std::uint32_t stored, double scale) { return stored / scale; }
/// The value a parameter takes after a store/load cycle.
inline double fixed_roundtrip(double value, double scale) {
  return from_fixed(to_fixed(value, scale), scale);
}

inline constexpr double kLambdaScale = 256.0;
inline constexpr double kSigmaScale = 256.0;
inline constexpr double kExponentScale = 4096.0;

std::vector<std::uint8_t> read_file(const std::string& path);
void write_file(const std::string& path, std::span<const std::uint8_t> bytes);

}  // namespace shic
