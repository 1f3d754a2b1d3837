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

#include "shic/image.hpp"
#include "shic/mask.hpp"

namespace shic {

/// Inclusive rectangle [x0, x1] x [y0, y1] with child links (-1 for leaves).
struct TreeNode {
  int x0 = 0, x1 = 0, y0 = 0, y1 = 0;
  int left = -1;
  int right = -1;

  bool is_leaf() const { return left < 0; }
  int side_x() const { return x1 - x0 + 1; }
  int side_y() const { return y1 - y0 + 1; }
};

/// Binary tree of rectangles. A split halves the longer side at
/// floor((lo + hi) / 2); both children keep the split line, so neighbouring
/// leaves share corners. Equal sides split vertically (left/right).
class SubdivisionTree {
 public:
  SubdivisionTree(int width, int height);

  int width() const { return width_; }
  int height() const { return height_; }
  const std::vector<TreeNode>& nodes() const { return nodes_; }
  const TreeNode& node(int i) const { return nodes_[static_cast<std::size_t>(i)]; }

  static bool can_split(const TreeNode& n) { return std::min(n.side_x(), n.side_y()) > 2; }
  /// Splits leaf i; returns the index of the left (or top) child.
  int split(int i);

  /// Leaf indices in depth-first preorder.
  std::vector<int> leaves() const;
  int depth() const;

  /// Same dimensions and same shape.
  friend bool operator==(const SubdivisionTree& a, const SubdivisionTree& b);

 private:
  int width_;
  int height_;
  std::vector<TreeNode> nodes_;
};

/// Depth-first preorder flags, 1 = split, 0 = leaf.
std::vector<std::uint8_t> serialize_tree(const SubdivisionTree& tree);
/// Inverse of serialize_tree. Throws ParseError if the bits run out, describe
/// a split the rule forbids, or are not fully consumed.
SubdivisionTree deserialize_tree(std::span<const std::uint8_t> bits, int width, int height);

/// Union of all leaf corners in canonical order.
MaskedData leaf_corners(const SubdivisionTree& tree);

/// Quantisation error curve point: MSE of the image against its q-level
/// quantisation, each level represented by the mean of the pixels it holds.
double quantization_error(const GrayImage& image, int q);
/// Smallest q with E(q) - E(q + 1) < 1, at most 256.
int select_q(const GrayImage& image);

enum class TreeMode { kIsotropic, kAnisotropic };

struct TreeParams {
  int q = 2;
  double p = 1.0;
  /// kNoAnisotropy for the isotropic mode.
  double lambda = 0.0;
  /// A leaf splits while its summed squared error exceeds this.
  double target_split_error = 0.0;
};

struct TreeOptions {
  int iter_max = 3;
  int trial_sweeps = 1;
  int golden_iterations = 8;
  std::uint64_t seed = 1;
};

struct TreeEncodeResult {
  std::vector<std::uint8_t> file;
  GrayImage reconstruction;
  TreeParams params;
  double mse = 0.0;
  std::size_t mask_size = 0;
  std::size_t leaf_count = 0;

  double ratio() const {
    return static_cast<double>(reconstruction.size()) / static_cast<double>(file.size());
  }
};

/// Shepard reconstruction from corner levels with Voronoi-adapted widths.
GrayImage tree_reconstruct(int width, int height, std::span<const Point> positions,
                           std::span<const int> levels, int q, double p, double lambda);

TreeEncodeResult subdivide_encode(const GrayImage& image, double target_split_error,
                                  TreeMode mode, const TreeOptions& options = {});
GrayImage subdivide_decode(std::span<const std::uint8_t> file);

struct TunedTree {
  TreeEncodeResult result;
  double split_error = 0.0;
  bool feasible = false;
  int encodes = 0;
};

/// Bisects the split threshold (log scale) until the ratio lands within
/// +-tolerance of the target, keeping the best in-band encode.
TunedTree tune_split_error(const GrayImage& image, double target_ratio, TreeMode mode,
                           const TreeOptions& options = {}, double tolerance = 0.05,
                           int max_encodes = 10);

}  // namespace shic
