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

#include "asymdet/anchors.h"

#include <cmath>
#include <sstream>

#include "asymdet/error.h"

namespace asymdet {
namespace {

double Sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double Logit(double p) { return std::log(p / (1.0 - p)); }

AnchorSpec Make(double w, double h, Level level,
                std::optional<ShapeClass> branch) {
  return AnchorSpec{w, h, LevelStride(level), branch, level};
}

}  // namespace

int LevelStride(Level level) {
  switch (level) {
    case Level::kP3:
      return 8;
    case Level::kP4:
      return 16;
    case Level::kP5:
      return 32;
  }
  return 0;
}

std::string_view LevelName(Level level) {
  switch (level) {
    case Level::kP3:
      return "P3";
    case Level::kP4:
      return "P4";
    case Level::kP5:
      return "P5";
  }
  return "?";
}

std::optional<Level> ParseLevel(std::string_view name) {
  if (name == "P3") return Level::kP3;
  if (name == "P4") return Level::kP4;
  if (name == "P5") return Level::kP5;
  return std::nullopt;
}

Pooling PoolingForBranch(std::optional<ShapeClass> branch) {
  if (!branch) return Pooling::kNone;
  switch (*branch) {
    case ShapeClass::kSquare:
      return Pooling::kNone;
    case ShapeClass::kWide:
      return Pooling::kPoolW;
    case ShapeClass::kTall:
      return Pooling::kPoolH;
  }
  return Pooling::kNone;
}

void ValidateAnchor(const AnchorSpec& spec) {
  if (!(spec.anchor_w > 0) || !(spec.anchor_h > 0)) {
    throw Error(ErrorKind::kConfig, "anchor dimensions must be positive");
  }
  if (spec.stride != LevelStride(spec.level)) {
    throw Error(ErrorKind::kConfig,
                "anchor stride " + std::to_string(spec.stride) +
                    " does not match level " + std::string(LevelName(spec.level)));
  }
  if (spec.branch) {
    const bool ok =
        (*spec.branch == ShapeClass::kSquare && spec.anchor_w == spec.anchor_h) ||
        (*spec.branch == ShapeClass::kWide && spec.anchor_w > spec.anchor_h) ||
        (*spec.branch == ShapeClass::kTall && spec.anchor_w < spec.anchor_h);
    if (!ok) {
      throw Error(ErrorKind::kConfig,
                  "anchor shape does not fit branch " +
                      std::string(ShapeClassName(*spec.branch)));
    }
  }
}

std::vector<AnchorSpec> NewAnchorSet() {
  using enum Level;
  constexpr auto kSq = ShapeClass::kSquare;
  constexpr auto kW = ShapeClass::kWide;
  constexpr auto kT = ShapeClass::kTall;
  return {
      Make(20, 20, kP3, kSq),  Make(60, 60, kP4, kSq),  Make(200, 200, kP5, kSq),
      Make(40, 20, kP3, kW),   Make(120, 60, kP4, kW),  Make(400, 200, kP5, kW),
      Make(20, 40, kP3, kT),   Make(60, 120, kP4, kT),  Make(200, 400, kP5, kT),
  };
}

std::vector<AnchorSpec> OriginalAnchorSet() {
  using enum Level;
  return {
      Make(10, 13, kP3, {}),   Make(16, 30, kP3, {}),   Make(33, 23, kP3, {}),
      Make(30, 61, kP4, {}),   Make(62, 45, kP4, {}),   Make(59, 119, kP4, {}),
      Make(116, 90, kP5, {}),  Make(156, 198, kP5, {}), Make(373, 326, kP5, {}),
  };
}

const AnchorSpec& FindAnchor(const std::vector<AnchorSpec>& set, Level level,
                             std::optional<ShapeClass> branch) {
  for (const auto& a : set) {
    if (a.level == level && a.branch == branch) return a;
  }
  throw Error(ErrorKind::kConfig,
              "no anchor for " + std::string(LevelName(level)) + "/" +
                  (branch ? std::string(ShapeClassName(*branch)) : "-"));
}

std::string FormatAnchorConfig(const std::vector<AnchorSpec>& set) {
  std::ostringstream out;
  for (const auto& a : set) {
    out << LevelName(a.level) << ' '
        << (a.branch ? ShapeClassName(*a.branch) : std::string_view("-")) << ' '
        << a.anchor_w << ' ' << a.anchor_h << ' ' << a.stride << '\n';
  }
  return out.str();
}

std::vector<AnchorSpec> ParseAnchorConfig(std::string_view text) {
  std::vector<AnchorSpec> set;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream fields(line);
    std::string level_name;
    if (!(fields >> level_name)) continue;
    std::string branch_name;
    AnchorSpec spec;
    std::string extra;
    if (!(fields >> branch_name >> spec.anchor_w >> spec.anchor_h >> spec.stride) ||
        (fields >> extra)) {
      throw Error(ErrorKind::kParse,
                  "anchor config line " + std::to_string(line_no) +
                      ": expected 'level branch anchor_w anchor_h stride'");
    }
    const auto level = ParseLevel(level_name);
    if (!level) {
      throw Error(ErrorKind::kParse, "anchor config line " +
                                         std::to_string(line_no) +
                                         ": unknown level " + level_name);
    }
    spec.level = *level;
    if (branch_name != "-") {
      spec.branch = ParseShapeClass(branch_name);
      if (!spec.branch) {
        throw Error(ErrorKind::kParse, "anchor config line " +
                                           std::to_string(line_no) +
                                           ": unknown branch " + branch_name);
      }
    }
    ValidateAnchor(spec);
    set.push_back(spec);
  }
  return set;
}

Point GridGeometry::cell_center(int row, int col) const {
  const double s = stride;
  const double x = pooling == Pooling::kPoolW ? (col + 1.0) * s : (col + 0.5) * s;
  const double y = pooling == Pooling::kPoolH ? (row + 1.0) * s : (row + 0.5) * s;
  return {x, y};
}

GridGeometry MakeGridGeometry(const AnchorSpec& spec, int input_size) {
  if (spec.stride <= 0 || input_size <= 0 || input_size % spec.stride != 0) {
    throw Error(ErrorKind::kConfig,
                "input size " + std::to_string(input_size) +
                    " is not divisible by stride " + std::to_string(spec.stride));
  }
  const int n = input_size / spec.stride;
  GridGeometry g;
  g.stride = spec.stride;
  g.pooling = spec.pooling();
  g.rows = g.pooling == Pooling::kPoolH ? n - 1 : n;
  g.cols = g.pooling == Pooling::kPoolW ? n - 1 : n;
  if (g.rows < 1 || g.cols < 1) {
    throw Error(ErrorKind::kConfig, "input size too small for pooled grid");
  }
  return g;
}

std::vector<BBox> Decode(const Tensor& raw, const AnchorSpec& spec,
                         const GridGeometry& geometry, double conf_threshold) {
  if (raw.channels() != static_cast<std::size_t>(kBoxChannels)) {
    throw ShapeError("decode channels", std::to_string(kBoxChannels),
                     std::to_string(raw.channels()));
  }
  if (raw.height() != static_cast<std::size_t>(geometry.rows) ||
      raw.width() != static_cast<std::size_t>(geometry.cols)) {
    throw ShapeError("decode grid",
                     std::to_string(geometry.rows) + "x" + std::to_string(geometry.cols),
                     std::to_string(raw.height()) + "x" + std::to_string(raw.width()));
  }

  std::vector<BBox> boxes;
  const double stride = geometry.stride;
  for (int i = 0; i < geometry.rows; ++i) {
    for (int j = 0; j < geometry.cols; ++j) {
      const auto y = static_cast<std::size_t>(i);
      const auto x = static_cast<std::size_t>(j);
      // sigmoid is monotone, so the best class is the largest logit.
      int best = 0;
      double best_logit = raw.at(5, y, x);
      for (int c = 1; c < kNumClasses; ++c) {
        const double v = raw.at(5 + static_cast<std::size_t>(c), y, x);
        if (v > best_logit) {
          best_logit = v;
          best = c;
        }
      }
      const double conf = Sigmoid(raw.at(4, y, x)) * Sigmoid(best_logit);
      if (conf < conf_threshold) continue;

      const Point center = geometry.cell_center(i, j);
      const double sw = 2.0 * Sigmoid(raw.at(2, y, x));
      const double sh = 2.0 * Sigmoid(raw.at(3, y, x));
      BBox b;
      b.cx = center.x + (2.0 * Sigmoid(raw.at(0, y, x)) - 1.0) * stride;
      b.cy = center.y + (2.0 * Sigmoid(raw.at(1, y, x)) - 1.0) * stride;
      b.w = spec.anchor_w * sw * sw;
      b.h = spec.anchor_h * sh * sh;
      b.class_id = best;
      b.confidence = conf;
      b.branch = spec.branch;
      boxes.push_back(b);
    }
  }
  return boxes;
}

BoxLogits Encode(const BBox& box, const AnchorSpec& spec,
                 const GridGeometry& geometry, int row, int col) {
  const Point center = geometry.cell_center(row, col);
  const double stride = geometry.stride;
  const auto offset_logit = [&](double v, double c) {
    return Logit(((v - c) / stride + 1.0) / 2.0);
  };
  const auto scale_logit = [](double size, double anchor) {
    return Logit(std::sqrt(size / anchor) / 2.0);
  };
  return {offset_logit(box.cx, center.x), offset_logit(box.cy, center.y),
          scale_logit(box.w, spec.anchor_w), scale_logit(box.h, spec.anchor_h)};
}

}  // namespace asymdet
