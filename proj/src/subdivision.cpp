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

#include "shic/subdivision.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>

#include "shic/anisotropic.hpp"
#include "shic/container.hpp"
#include "shic/entropy.hpp"
#include "shic/golden.hpp"
#include "shic/tonal.hpp"
#include "shic/trial.hpp"

namespace shic {

SubdivisionTree::SubdivisionTree(int width, int height) : width_(width), height_(height) {
  if (width < 2 || height < 2) throw InvalidArgument("subdivision: image must be at least 2x2");
  nodes_.push_back({0, width - 1, 0, height - 1, -1, -1});
}

int SubdivisionTree::split(int i) {
  TreeNode n = node(i);
  if (!n.is_leaf() || !can_split(n)) throw InvalidArgument("subdivision: node cannot be split");
  TreeNode a = n, b = n;
  a.left = a.right = b.left = b.right = -1;
  if (n.side_x() >= n.side_y()) {
    const int m = (n.x0 + n.x1) / 2;
    a.x1 = m;
    b.x0 = m;
  } else {
    const int m = (n.y0 + n.y1) / 2;
    a.y1 = m;
    b.y0 = m;
  }
  const int left = static_cast<int>(nodes_.size());
  nodes_.push_back(a);
  nodes_.push_back(b);
  nodes_[static_cast<std::size_t>(i)].left = left;
  nodes_[static_cast<std::size_t>(i)].right = left + 1;
  return left;
}

std::vector<int> SubdivisionTree::leaves() const {
  std::vector<int> out;
  std::vector<int> stack{0};
  while (!stack.empty()) {
    const int i = stack.back();
    stack.pop_back();
    const TreeNode& n = node(i);
    if (n.is_leaf()) {
      out.push_back(i);
    } else {
      stack.push_back(n.right);
      stack.push_back(n.left);
    }
  }
  return out;
}

int SubdivisionTree::depth() const {
  int best = 0;
  std::vector<std::pair<int, int>> stack{{0, 0}};
  while (!stack.empty()) {
    const auto [i, d] = stack.back();
    stack.pop_back();
    best = std::max(best, d);
    const TreeNode& n = node(i);
    if (!n.is_leaf()) {
      stack.push_back({n.left, d + 1});
      stack.push_back({n.right, d + 1});
    }
  }
  return best;
}

bool operator==(const SubdivisionTree& a, const SubdivisionTree& b) {
  return a.width() == b.width() && a.height() == b.height() &&
         serialize_tree(a) == serialize_tree(b);
}

std::vector<std::uint8_t> serialize_tree(const SubdivisionTree& tree) {
  std::vector<std::uint8_t> bits;
  bits.reserve(tree.nodes().size());
  std::vector<int> stack{0};
  while (!stack.empty()) {
    const int i = stack.back();
    stack.pop_back();
    const TreeNode& n = tree.node(i);
    bits.push_back(n.is_leaf() ? 0 : 1);
    if (!n.is_leaf()) {
      stack.push_back(n.right);
      stack.push_back(n.left);
    }
  }
  return bits;
}

SubdivisionTree deserialize_tree(std::span<const std::uint8_t> bits, int width, int height) {
  using Kind = ParseError::Kind;
  if (width < 2 || height < 2) throw ParseError(Kind::kPayload, "tree: image too small");
  SubdivisionTree tree(width, height);
  std::size_t pos = 0;
  std::vector<int> stack{0};
  while (!stack.empty()) {
    const int i = stack.back();
    stack.pop_back();
    if (pos >= bits.size()) throw ParseError(Kind::kTruncated, "tree: bit stream ended early");
    if (bits[pos++] == 0) continue;
    if (!SubdivisionTree::can_split(tree.node(i))) {
      throw ParseError(Kind::kPayload, "tree: split of a minimum-size block");
    }
    const int left = tree.split(i);
    stack.push_back(left + 1);
    stack.push_back(left);
  }
  if (pos != bits.size()) throw ParseError(Kind::kPayload, "tree: trailing bits");
  return tree;
}

MaskedData leaf_corners(const SubdivisionTree& tree) {
  std::vector<Point> points;
  for (int i : tree.leaves()) {
    const TreeNode& n = tree.node(i);
    points.push_back({n.x0, n.y0});
    points.push_back({n.x1, n.y0});
    points.push_back({n.x0, n.y1});
    points.push_back({n.x1, n.y1});
  }
  return make_mask(tree.width(), tree.height(), std::move(points));
}

namespace {

std::array<double, 256> histogram(const GrayImage& image) {
  std::array<double, 256> hist{};
  const GrayImage q = quantize_to_8bit(image);
  for (Eigen::Index i = 0; i < q.size(); ++i) hist[static_cast<std::size_t>(q.data()[i])] += 1.0;
  return hist;
}

double quantization_error(const std::array<double, 256>& hist, double total, int q) {
  const Quantizer quant(q);
  std::vector<double> n(static_cast<std::size_t>(q)), s(n.size()), s2(n.size());
  for (int v = 0; v < 256; ++v) {
    if (hist[v] == 0.0) continue;
    const auto l = static_cast<std::size_t>(quant.level(v));
    n[l] += hist[v];
    s[l] += hist[v] * v;
    s2[l] += hist[v] * v * v;
  }
  double err = 0.0;
  for (std::size_t l = 0; l < n.size(); ++l) {
    if (n[l] > 0.0) err += s2[l] - s[l] * s[l] / n[l];
  }
  return std::max(0.0, err) / total;
}

}  // namespace

double quantization_error(const GrayImage& image, int q) {
  if (q < 2 || q > 256) throw InvalidArgument("quantization_error: q must lie in [2, 256]");
  return quantization_error(histogram(image), static_cast<double>(image.size()), q);
}

int select_q(const GrayImage& image) {
  const auto hist = histogram(image);
  const double total = static_cast<double>(image.size());
  double prev = quantization_error(hist, total, 2);
  for (int q = 2; q < 256; ++q) {
    const double next = quantization_error(hist, total, q + 1);
    if (prev - next < 1.0) return q;
    prev = next;
  }
  return 256;
}

GrayImage tree_reconstruct(int width, int height, std::span<const Point> positions,
                           std::span<const int> levels, int q, double p, double lambda) {
  if (levels.size() != positions.size()) throw InvalidArgument("tree: level count mismatch");
  const Quantizer quant(q);
  std::vector<double> values(levels.size());
  for (std::size_t i = 0; i < levels.size(); ++i) values[i] = quant.value(levels[i]);
  const auto field = voronoi_sigmas(positions, width, height, p);
  return inpaint_aniso(positions, values, field.sigma, lambda, width, height);
}

namespace {

constexpr double kPMin = 0.0;
constexpr double kPMax = 2.0;
constexpr double kLambdaMin = 0.5;
constexpr double kLambdaMax = 255.0;

CodecId codec_for(TreeMode mode) {
  return mode == TreeMode::kIsotropic ? CodecId::kTreeIso : CodecId::kTreeAniso;
}

// Summed, not averaged: a large block with moderate error costs more than a
// 3x3 block of texture, and splitting it buys more.
double leaf_error(const TreeNode& n, const GrayImage& a, const GrayImage& b) {
  const auto rows = n.side_y(), cols = n.side_x();
  return (a.block(n.y0, n.x0, rows, cols) - b.block(n.y0, n.x0, rows, cols)).square().sum();
}

}  // namespace

TreeEncodeResult subdivide_encode(const GrayImage& image, double target_split_error,
                                  TreeMode mode, const TreeOptions& options) {
  if (!(target_split_error > 0.0)) throw InvalidArgument("subdivide_encode: threshold must be > 0");
  if (image.rows() > 65535 || image.cols() > 65535) {
    throw InvalidArgument("subdivide_encode: image too large");
  }
  const int w = width(image), h = height(image);
  const bool aniso = mode == TreeMode::kAnisotropic;
  const int q = select_q(image);
  const Quantizer quant(q);

  SubdivisionTree tree(w, h);
  std::map<Point, int> carried;
  double p = fixed_roundtrip(1.0, kExponentScale);
  double lambda = aniso ? fixed_roundtrip(8.0, kLambdaScale) : kNoAnisotropy;
  std::uint64_t seed = options.seed;

  MaskedData mask;
  std::vector<int> levels;
  GrayImage recon;
  for (;;) {
    mask = leaf_corners(tree);
    levels.assign(mask.size(), 0);
    for (std::size_t i = 0; i < mask.size(); ++i) {
      const Point pt = mask.positions[i];
      const auto it = carried.find(pt);
      levels[i] = it != carried.end() ? it->second : quant.level(image(pt.y, pt.x));
    }
    const auto areas = voronoi_sigmas(mask.positions, w, h, 0.0).voronoi_area;
    auto sigmas_for = [&](double exponent) {
      std::vector<double> s(areas.size());
      for (std::size_t k = 0; k < areas.size(); ++k) s[k] = voronoi_sigma(areas[k], exponent);
      return s;
    };
    auto values_of = [&] {
      std::vector<double> v(levels.size());
      for (std::size_t i = 0; i < levels.size(); ++i) v[i] = quant.value(levels[i]);
      return v;
    };

    for (int it = 0; it < options.iter_max; ++it) {
      const auto values = values_of();
      auto error_for = [&](double exponent, double lam) {
        return mse(inpaint_aniso(mask.positions, values, sigmas_for(exponent), lam, w, h), image);
      };
      auto by_p = [&](double x) { return error_for(fixed_roundtrip(x, kExponentScale), lambda); };
      p = fixed_roundtrip(golden_section(by_p, kPMin, kPMax, options.golden_iterations).x,
                          kExponentScale);
      if (aniso) {
        auto by_lambda = [&](double t) {
          return error_for(p, fixed_roundtrip(std::exp(t), kLambdaScale));
        };
        const auto best = golden_section(by_lambda, std::log(kLambdaMin), std::log(kLambdaMax),
                                         options.golden_iterations);
        lambda = fixed_roundtrip(std::exp(best.x), kLambdaScale);
      }
      ShepardTrialModel model(mask.positions, values, sigmas_for(p), lambda, image);
      tonal_optimize_trial(model, levels, quant, options.trial_sweeps, seed++);
    }

    recon = tree_reconstruct(w, h, mask.positions, levels, q, p, lambda);
    bool split_any = false;
    for (int leaf : tree.leaves()) {
      const TreeNode& n = tree.node(leaf);
      if (SubdivisionTree::can_split(n) && leaf_error(n, recon, image) > target_split_error) {
        tree.split(leaf);
        split_any = true;
      }
    }
    if (!split_any) break;
    carried.clear();
    for (std::size_t i = 0; i < mask.size(); ++i) carried[mask.positions[i]] = levels[i];
  }

  const auto tree_bits = serialize_tree(tree);
  std::vector<std::uint8_t> packed((tree_bits.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < tree_bits.size(); ++i) {
    if (tree_bits[i]) packed[i / 8] |= static_cast<std::uint8_t>(0x80u >> (i % 8));
  }
  const auto payload = field_encode(levels, field_width(q));

  ByteWriter out;
  write_header(out, {codec_for(mode), w, h, q});
  out.u16(to_fixed(p, kExponentScale));
  if (aniso) out.u16(to_fixed(lambda, kLambdaScale));
  out.u32(static_cast<std::uint32_t>(tree_bits.size()));
  out.bytes(packed);
  out.u32(static_cast<std::uint32_t>(levels.size()));
  out.bytes(payload);

  TreeEncodeResult result;
  result.file = out.take();
  result.reconstruction = std::move(recon);
  result.params = {q, p, lambda, target_split_error};
  result.mse = mse(result.reconstruction, image);
  result.mask_size = mask.size();
  result.leaf_count = tree.leaves().size();
  return result;
}

GrayImage subdivide_decode(std::span<const std::uint8_t> file) {
  using Kind = ParseError::Kind;
  ByteReader in(file);
  const ContainerHeader header = read_header(in);
  if (header.codec != CodecId::kTreeIso && header.codec != CodecId::kTreeAniso) {
    throw ParseError(Kind::kCodec, std::string("tree: cannot decode ") + codec_name(header.codec));
  }
  const bool aniso = header.codec == CodecId::kTreeAniso;
  const double p = from_fixed(in.u16(), kExponentScale);
  const double lambda = aniso ? from_fixed(in.u16(), kLambdaScale) : kNoAnisotropy;
  if (!(lambda > 0.0)) throw ParseError(Kind::kPayload, "tree: non-positive lambda");
  const std::uint32_t bit_count = in.u32();
  if (bit_count == 0) throw ParseError(Kind::kPayload, "tree: empty tree");
  const auto packed = in.bytes((static_cast<std::size_t>(bit_count) + 7) / 8);
  std::vector<std::uint8_t> bits(bit_count);
  for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = (packed[i / 8] >> (7 - i % 8)) & 1u;
  const SubdivisionTree tree = deserialize_tree(bits, header.width, header.height);
  const MaskedData mask = leaf_corners(tree);
  if (in.u32() != mask.size()) throw ParseError(Kind::kPayload, "tree: value count mismatch");
  const int fw = field_width(header.q);
  const auto levels = field_decode(in.rest(), mask.size(), fw);
  for (int l : levels) {
    if (l >= header.q) throw ParseError(Kind::kPayload, "tree: level out of range");
  }
  return tree_reconstruct(header.width, header.height, mask.positions, levels, header.q, p,
                          lambda);
}

TunedTree tune_split_error(const GrayImage& image, double target_ratio, TreeMode mode,
                           const TreeOptions& options, double tolerance, int max_encodes) {
  const double lo_ratio = target_ratio * (1.0 - tolerance);
  const double hi_ratio = target_ratio * (1.0 + tolerance);
  TunedTree best;
  bool have = false;
  auto consider = [&](double threshold, TreeEncodeResult r) {
    ++best.encodes;
    const double ratio = r.ratio();
    const bool in_band = ratio >= lo_ratio && ratio <= hi_ratio;
    const double miss = in_band ? 0.0 : std::min(std::abs(ratio - lo_ratio),
                                                 std::abs(ratio - hi_ratio));
    const double best_miss =
        !have ? 0.0
              : (best.feasible ? 0.0
                               : std::min(std::abs(best.result.ratio() - lo_ratio),
                                          std::abs(best.result.ratio() - hi_ratio)));
    const bool take = !have || (in_band && (!best.feasible || r.mse < best.result.mse)) ||
                      (!in_band && !best.feasible && miss < best_miss);
    if (take) {
      best.result = std::move(r);
      best.split_error = threshold;
      best.feasible = in_band;
      have = true;
    }
    return ratio;
  };

  // Ratio grows with the threshold (fewer splits). Search on log(threshold):
  // bisection until the target is bracketed by measured encodes, then
  // interpolation of log(ratio) between the bracketing pair.
  const double max_error = 255.0 * 255.0 * static_cast<double>(image.size());
  double lo = 0.0, hi = std::log(max_error);
  double lo_r = 0.0, hi_r = 0.0;  // log ratios at lo / hi once measured
  bool lo_known = false, hi_known = false;
  const double goal = std::log(target_ratio);
  while (best.encodes < max_encodes) {
    double mid = 0.5 * (lo + hi);
    if (lo_known && hi_known && hi_r > lo_r) {
      const double t = std::clamp((goal - lo_r) / (hi_r - lo_r), 0.1, 0.9);
      mid = lo + t * (hi - lo);
    }
    const double threshold = std::exp(mid);
    const double ratio = consider(threshold, subdivide_encode(image, threshold, mode, options));
    if (ratio < lo_ratio) {
      lo = mid;
      lo_r = std::log(ratio);
      lo_known = true;
    } else {
      // Above the band, or inside it: more splitting buys quality.
      hi = mid;
      hi_r = std::log(ratio);
      hi_known = true;
    }
    if (hi - lo < 1e-3) break;
  }
  return best;
}

}  // namespace shic
