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

#include "asymdet/boxes.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "asymdet/error.h"

namespace asymdet {

std::string_view ShapeClassName(ShapeClass s) {
  switch (s) {
    case ShapeClass::kSquare:
      return "square";
    case ShapeClass::kWide:
      return "wide";
    case ShapeClass::kTall:
      return "tall";
  }
  return "?";
}

std::optional<ShapeClass> ParseShapeClass(std::string_view name) {
  if (name == "square") return ShapeClass::kSquare;
  if (name == "wide") return ShapeClass::kWide;
  if (name == "tall") return ShapeClass::kTall;
  return std::nullopt;
}

bool IsValid(const BBox& b) {
  return std::isfinite(b.cx) && std::isfinite(b.cy) && std::isfinite(b.w) &&
         std::isfinite(b.h) && b.w >= 0 && b.h >= 0 && b.class_id >= 0 &&
         b.class_id < kNumClasses && b.confidence >= 0 && b.confidence <= 1;
}

double Iou(const BBox& a, const BBox& b) {
  const double iw = std::min(a.x2(), b.x2()) - std::max(a.x1(), b.x1());
  const double ih = std::min(a.y2(), b.y2()) - std::max(a.y1(), b.y1());
  const double inter = (iw > 0 && ih > 0) ? iw * ih : 0.0;
  const double uni = a.area() + b.area() - inter;
  if (uni <= 0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

ShapeClass ClassifyShape(double w, double h) {
  if (!(h > 0) || !(w >= 0) || !std::isfinite(w) || !std::isfinite(h)) {
    throw Error(ErrorKind::kDegenerate,
                "cannot classify box " + std::to_string(w) + "x" +
                    std::to_string(h));
  }
  // Written as two products rather than a ratio so that swapping w and h
  // swaps Wide and Tall exactly.
  if (w > kSquareRatioLimit * h) return ShapeClass::kWide;
  if (h > kSquareRatioLimit * w) return ShapeClass::kTall;
  return ShapeClass::kSquare;
}

}  // namespace asymdet
