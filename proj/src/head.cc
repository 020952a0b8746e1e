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

#include "asymdet/head.h"

#include <string>

#include "asymdet/error.h"

namespace asymdet {
namespace {

constexpr std::array<Level, 3> kLevels = {Level::kP3, Level::kP4, Level::kP5};

std::string LevelLabel(std::size_t index) {
  return std::string(LevelName(kLevels[index]));
}

void CheckNeck(const NeckMaps& neck, const HeadConfig& config) {
  for (std::size_t l = 0; l < 3; ++l) {
    const Tensor& map = neck.maps[l];
    const auto side = static_cast<std::size_t>(config.input_size /
                                               LevelStride(kLevels[l]));
    if (map.channels() != kNeckChannels[l] || map.height() != side ||
        map.width() != side) {
      throw ShapeError("neck map " + LevelLabel(l),
                       std::to_string(kNeckChannels[l]) + "x" +
                           std::to_string(side) + "x" + std::to_string(side),
                       map.ShapeString());
    }
  }
}

}  // namespace

std::size_t HeadOutChannels(HeadVariant variant) {
  return variant == HeadVariant::kAsym ? kBoxChannels : 3 * kBoxChannels;
}

std::size_t HeadConfig::out_channels() const { return HeadOutChannels(variant); }

HeadConfig ZeroHeadConfig(HeadVariant variant, int input_size) {
  HeadConfig config;
  config.variant = variant;
  config.input_size = input_size;
  const std::size_t out = HeadOutChannels(variant);
  for (std::size_t l = 0; l < 3; ++l) {
    config.levels[l].weights = Matrix(out, kNeckChannels[l]);
    config.levels[l].bias.assign(out, 0.0);
  }
  config.anchors =
      variant == HeadVariant::kAsym ? NewAnchorSet() : OriginalAnchorSet();
  return config;
}

void ValidateHeadConfig(const HeadConfig& config) {
  if (config.input_size <= 0 || config.input_size % 32 != 0) {
    throw Error(ErrorKind::kConfig, "input size " +
                                        std::to_string(config.input_size) +
                                        " must be a positive multiple of 32");
  }
  const std::size_t out = config.out_channels();
  for (std::size_t l = 0; l < 3; ++l) {
    const auto& lw = config.levels[l];
    if (lw.weights.rows() != out || lw.weights.cols() != kNeckChannels[l]) {
      throw ShapeError("head weights " + LevelLabel(l),
                       std::to_string(out) + "x" + std::to_string(kNeckChannels[l]),
                       std::to_string(lw.weights.rows()) + "x" +
                           std::to_string(lw.weights.cols()));
    }
    if (lw.bias.size() != out) {
      throw ShapeError("head bias " + LevelLabel(l), std::to_string(out),
                       std::to_string(lw.bias.size()));
    }
  }
  for (const auto& a : config.anchors) ValidateAnchor(a);
}

HeadOutput RunHead(const NeckMaps& neck, const HeadConfig& config) {
  if (config.variant != HeadVariant::kAsym) {
    throw Error(ErrorKind::kConfig, "RunHead requires the asymmetric variant");
  }
  ValidateHeadConfig(config);
  CheckNeck(neck, config);

  HeadOutput out;
  out.maps.reserve(9);
  for (std::size_t k = 3; k-- > 0;) {
    const Level level = kLevels[k];
    const auto& lw = config.levels[k];
    Tensor y = Conv1x1(neck.maps[k], lw.weights, lw.bias);
    Tensor wide = AvgPool(y, {1, 2}, {1, 1});
    Tensor tall = AvgPool(y, {2, 1}, {1, 1});
    out.maps.push_back(
        {std::move(y), FindAnchor(config.anchors, level, ShapeClass::kSquare)});
    out.maps.push_back(
        {std::move(wide), FindAnchor(config.anchors, level, ShapeClass::kWide)});
    out.maps.push_back(
        {std::move(tall), FindAnchor(config.anchors, level, ShapeClass::kTall)});
  }
  return out;
}

std::vector<OriginalHeadMap> RunOriginalHead(const NeckMaps& neck,
                                             const HeadConfig& config) {
  if (config.variant != HeadVariant::kOriginal) {
    throw Error(ErrorKind::kConfig,
                "RunOriginalHead requires the original variant");
  }
  ValidateHeadConfig(config);
  CheckNeck(neck, config);

  std::vector<OriginalHeadMap> out;
  for (std::size_t l = 0; l < 3; ++l) {
    std::vector<AnchorSpec> group;
    for (const auto& a : config.anchors) {
      if (a.level == kLevels[l]) group.push_back(a);
    }
    if (group.size() != 3) {
      throw Error(ErrorKind::kConfig, "level " + LevelLabel(l) +
                                          " needs exactly 3 anchors, has " +
                                          std::to_string(group.size()));
    }
    const auto& lw = config.levels[l];
    out.push_back({Conv1x1(neck.maps[l], lw.weights, lw.bias),
                   {group[0], group[1], group[2]}});
  }
  return out;
}

Tensor AnchorSlice(const Tensor& raw, std::size_t k) {
  const auto per = static_cast<std::size_t>(kBoxChannels);
  if (raw.channels() != 3 * per || k >= 3) {
    throw ShapeError("anchor slice", std::to_string(3 * per) + " channels, k < 3",
                     raw.ShapeString() + ", k=" + std::to_string(k));
  }
  const auto plane = raw.plane_size();
  const auto first = raw.data().begin() + static_cast<std::ptrdiff_t>(k * per * plane);
  return Tensor(per, raw.height(), raw.width(),
                std::vector<double>(first, first + static_cast<std::ptrdiff_t>(per * plane)));
}

std::uint64_t ConvParameterCount(const HeadConfig& config) {
  std::uint64_t n = 0;
  for (const auto& lw : config.levels) {
    n += lw.weights.rows() * lw.weights.cols() + lw.bias.size();
  }
  return n;
}

std::uint64_t HeadParameterCount(const HeadConfig& config) {
  // The wide and tall branches reuse the level's conv output and average it;
  // they add no weights of their own.
  return ConvParameterCount(config);
}

}  // namespace asymdet
