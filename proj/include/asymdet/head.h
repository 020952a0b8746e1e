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

#ifndef ASYMDET_HEAD_H_
#define ASYMDET_HEAD_H_

#include <array>
#include <cstdint>
#include <vector>

#include "asymdet/anchors.h"
#include "asymdet/tensor.h"

namespace asymdet {

// Neck channel widths feeding the detection convolutions (YOLOv5 P3/P4/P5
// at width multiple 1.0).
inline constexpr std::array<std::size_t, 3> kNeckChannels = {256, 512, 1024};
inline constexpr int kDefaultInputSize = 640;

enum class HeadVariant { kOriginal, kAsym };

// Indexed by level: 0 = P3, 1 = P4, 2 = P5.
struct NeckMaps {
  std::array<Tensor, 3> maps;
};

struct LevelWeights {
  Matrix weights;  // [out_channels x neck_channels]
  std::vector<double> bias;
};

struct HeadConfig {
  HeadVariant variant = HeadVariant::kAsym;
  int input_size = kDefaultInputSize;
  std::array<LevelWeights, 3> levels;  // P3, P4, P5
  std::vector<AnchorSpec> anchors;

  // 85 for the asymmetric head, 3 * 85 for the baseline.
  std::size_t out_channels() const;
};

// Output channels per level for a head variant.
std::size_t HeadOutChannels(HeadVariant variant);

// Zero weights and biases with the default anchor set for the variant.
HeadConfig ZeroHeadConfig(HeadVariant variant, int input_size = kDefaultInputSize);

// Throws kShape/kConfig naming the offending level.
void ValidateHeadConfig(const HeadConfig& config);

struct HeadMap {
  Tensor raw;
  AnchorSpec anchor;
};

// Nine maps ordered P5 (square, wide, tall), P4 (...), P3 (...).
struct HeadOutput {
  std::vector<HeadMap> maps;
};

HeadOutput RunHead(const NeckMaps& neck, const HeadConfig& config);

// Baseline head: one (3*85)-channel map per level, P3 first, each paired
// with that level's three anchors.
struct OriginalHeadMap {
  Tensor raw;
  std::array<AnchorSpec, 3> anchors;
};

std::vector<OriginalHeadMap> RunOriginalHead(const NeckMaps& neck,
                                             const HeadConfig& config);

// Channels [85k, 85k + 85) of a baseline map, which decode against anchor k.
Tensor AnchorSlice(const Tensor& raw, std::size_t k);

// Learnable parameters: conv weights plus biases. Pooling contributes none.
std::uint64_t HeadParameterCount(const HeadConfig& config);
// Parameters of the per-level 1x1 detection convolutions alone.
std::uint64_t ConvParameterCount(const HeadConfig& config);

}  // namespace asymdet

#endif  // ASYMDET_HEAD_H_
