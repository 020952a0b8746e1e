/* Copyright 2026 The asymdet Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef ASYMDET_ANCHORS_H_
#define ASYMDET_ANCHORS_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "asymdet/boxes.h"
#include "asymdet/tensor.h"

namespace asymdet {

// Pyramid level of the pre-pooling grid: P3/P4/P5 have strides 8/16/32.
enum class Level { kP3, kP4, kP5 };

int LevelStride(Level level);
std::string_view LevelName(Level level);
std::optional<Level> ParseLevel(std::string_view name);

// How a branch shrinks its level's grid. PoolW is the (1,2) window (one
// column fewer), PoolH the (2,1) window (one row fewer).
enum class Pooling { kNone, kPoolW, kPoolH };

Pooling PoolingForBranch(std::optional<ShapeClass> branch);

struct AnchorSpec {
  double anchor_w = 0;
  double anchor_h = 0;
  int stride = 0;
  // Empty for the baseline head, whose three anchors share one grid.
  std::optional<ShapeClass> branch;
  Level level = Level::kP3;

  Pooling pooling() const { return PoolingForBranch(branch); }
  bool operator==(const AnchorSpec&) const = default;
};

// Throws kConfig if dims, stride, or branch/shape pairing are inconsistent.
void ValidateAnchor(const AnchorSpec& spec);

// The nine one-anchor-per-map specs of the asymmetric head, in the order
// squares (P3, P4, P5), wides (P3, P4, P5), talls (P3, P4, P5).
std::vector<AnchorSpec> NewAnchorSet();

// Baseline YOLOv5 anchors, three per level, P3 first. `branch` is empty.
std::vector<AnchorSpec> OriginalAnchorSet();

// Returns the anchor for (level, branch) or throws kConfig.
const AnchorSpec& FindAnchor(const std::vector<AnchorSpec>& set, Level level,
                             std::optional<ShapeClass> branch);

// Plain-text form: one "level branch anchor_w anchor_h stride" line per
// anchor; branch is "-" for unbranched anchors. '#' starts a comment.
std::string FormatAnchorConfig(const std::vector<AnchorSpec>& set);
std::vector<AnchorSpec> ParseAnchorConfig(std::string_view text);

struct Point {
  double x;
  double y;
};

struct GridGeometry {
  int rows = 0;
  int cols = 0;
  int stride = 0;
  Pooling pooling = Pooling::kNone;

  // Pixel center of cell (row, col). A pooled cell sits at the mean of the
  // two base cells it averages.
  Point cell_center(int row, int col) const;
};

// Throws kConfig when input_size is not a positive multiple of the stride.
GridGeometry MakeGridGeometry(const AnchorSpec& spec, int input_size);

// Raw channel layout: tx, ty, tw, th, objectness, then one logit per class.
inline constexpr int kBoxChannels = 4 + 1 + kNumClasses;

// Decodes one 85-channel prediction map. Keeps boxes whose
// objectness * best class probability is >= conf_threshold; cells are
// visited in row-major order.
std::vector<BBox> Decode(const Tensor& raw, const AnchorSpec& spec,
                         const GridGeometry& geometry, double conf_threshold);

// Inverse of the box part of Decode for one cell.
struct BoxLogits {
  double tx, ty, tw, th;
};
BoxLogits Encode(const BBox& box, const AnchorSpec& spec,
                 const GridGeometry& geometry, int row, int col);

}  // namespace asymdet

#endif  // ASYMDET_ANCHORS_H_
