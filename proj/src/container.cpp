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

#include "shic/container.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>

#include "shic/error.hpp"

namespace shic {

const char* codec_name(CodecId id) {
  switch (id) {
    case CodecId::kRjip: return "rjip";
    case CodecId::kRjipA: return "rjip-a";
    case CodecId::kTreeIso: return "tree-iso";
    case CodecId::kTreeAniso: return "tree-aniso";
  }
  return "unknown";
}

std::uint32_t ByteReader::u8() {
  if (pos_ >= bytes_.size()) throw ParseError(ParseError::Kind::kTruncated, "container truncated");
  return bytes_[pos_++];
}

std::uint32_t ByteReader::u16() {
  const std::uint32_t lo = u8();
  return lo | (u8() << 8);
}

std::uint32_t ByteReader::u32() {
  const std::uint32_t lo = u16();
  return lo | (u16() << 16);
}

std::span<const std::uint8_t> ByteReader::bytes(std::size_t n) {
  if (remaining() < n) throw ParseError(ParseError::Kind::kTruncated, "container payload truncated");
  auto s = bytes_.subspan(pos_, n);
  pos_ += n;
  return s;
}

std::span<const std::uint8_t> ByteReader::rest() { return bytes(remaining()); }

void write_header(ByteWriter& out, const ContainerHeader& h) {
  for (char c : kMagic) out.u8(static_cast<std::uint8_t>(c));
  out.u8(kVersion);
  out.u8(static_cast<std::uint8_t>(h.codec));
  out.u16(static_cast<std::uint32_t>(h.width));
  out.u16(static_cast<std::uint32_t>(h.height));
  out.u8(static_cast<std::uint32_t>(h.q - 1));
}

ContainerHeader read_header(ByteReader& in) {
  using Kind = ParseError::Kind;
  if (in.remaining() < 4) throw ParseError(Kind::kMagic, "not a SHIC file: magic mismatch");
  for (char c : kMagic) {
    if (in.u8() != static_cast<std::uint8_t>(c)) {
      throw ParseError(Kind::kMagic, "not a SHIC file: magic mismatch");
    }
  }
  const std::uint32_t version = in.u8();
  if (version != kVersion) {
    throw ParseError(Kind::kVersion, "unsupported SHIC version " + std::to_string(version));
  }
  const std::uint32_t codec = in.u8();
  if (codec > 3) throw ParseError(Kind::kCodec, "unknown codec id " + std::to_string(codec));
  ContainerHeader h;
  h.codec = static_cast<CodecId>(codec);
  h.width = static_cast<int>(in.u16());
  h.height = static_cast<int>(in.u16());
  h.q = static_cast<int>(in.u8()) + 1;
  if (h.width == 0 || h.height == 0) throw ParseError(Kind::kHeader, "empty image in header");
  if (h.q < 2) throw ParseError(Kind::kHeader, "q must be at least 2");
  return h;
}

ContainerHeader peek_header(std::span<const std::uint8_t> file) {
  ByteReader in(file);
  return read_header(in);
}

std::uint16_t to_fixed(double value, double scale) {
  const double scaled = std::round(value * scale);
  return static_cast<std::uint16_t>(std::clamp(scaled, 0.0, 65535.0));
}

std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::string& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace shic
