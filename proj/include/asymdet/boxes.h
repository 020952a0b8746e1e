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

#ifndef ASYMDET_BOXES_H_
#define ASYMDET_BOXES_H_

#include <optional>
#include <string_view>

namespace asymdet {

inline constexpr int kNumClasses = 80;

// Receptive-field / aspect-ratio class. Square owns the closed interval
// w/h in [1/1.2, 1.2].
enum class ShapeClass { kSquare, kWide, kTall };

inline constexpr double kSquareRatioLimit = 1.2;

std::string_view ShapeClassName(ShapeClass s);
std::optional<ShapeClass> ParseShapeClass(std::string_view name);

// Axis-aligned box in pixel center format. `branch` records which head
// branch produced a prediction; ground truth leaves it empty.
struct BBox {
  double cx = 0;
  double cy = 0;
  double w = 0;
  double h = 0;
  int class_id = 0;
  double confidence = 1.0;
  std::optional<ShapeClass> branch;

  double area() const { return w * h; }
  double x1() const { return cx - 0.5 * w; }
  double y1() const { return cy - 0.5 * h; }
  double x2() const { return cx + 0.5 * w; }
  double y2() const { return cy + 0.5 * h; }

  bool operator==(const BBox&) const = default;
};

// Checks the BBox invariants (finite center, non-negative extent, class in
// range, confidence in [0, 1]).
bool IsValid(const BBox& b);

// Intersection over union. Zero when the union has no area.
double Iou(const BBox& a, const BBox& b);

// Throws ErrorKind::kDegenerate when h == 0 (or w < 0).
ShapeClass ClassifyShape(double w, double h);

}  // namespace asymdet

#endif  // ASYMDET_BOXES_H_
