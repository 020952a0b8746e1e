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

#ifndef ASYMDET_PIPELINE_H_
#define ASYMDET_PIPELINE_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "asymdet/dataset.h"
#include "asymdet/eval.h"
#include "asymdet/head.h"
#include "asymdet/nms.h"

namespace asymdet {

// Fixture directory layout:
//   head_w_p3.ast ... head_b_p5.ast          asymmetric head, 85 outputs
//   original_head_w_p3.ast ...               baseline head, 255 outputs
//   anchors.txt, original_anchors.txt        anchor configs (optional)
//   images/<image_id>/neck_p3.ast ... p5     neck maps per image
//   labels/<image_id>.txt, sizes.csv         ground truth
namespace fixture {
std::string WeightFile(HeadVariant variant, Level level);
std::string BiasFile(HeadVariant variant, Level level);
std::string AnchorFile(HeadVariant variant);
std::string NeckFile(Level level);
inline constexpr std::string_view kImagesDir = "images";
inline constexpr std::string_view kLabelsDir = "labels";
inline constexpr std::string_view kSizeManifest = "sizes.csv";
}  // namespace fixture

struct SynthOptions {
  std::uint64_t seed = 0;
  int image_count = 3;
  int input_size = kDefaultInputSize;
  bool zero_weights = false;
  std::filesystem::path out;
};

// Writes a deterministic fixture directory. Same options give byte-identical
// files.
void Synthesize(const SynthOptions& options);

// Seeded uniform(-k, k) weights with k = 1 / sqrt(fan_in), values rounded
// to float32.
HeadConfig RandomHeadConfig(HeadVariant variant, std::uint64_t seed,
                            int input_size = kDefaultInputSize);

HeadConfig LoadHeadConfig(const std::filesystem::path& fixture_dir,
                          HeadVariant variant, int input_size);
NeckMaps LoadNeckMaps(const std::filesystem::path& image_dir);

struct Detection {
  std::string image_id;
  BBox box;
};

// "image_id class_id conf cx cy w h branch"; branch is "-" when untagged.
std::string FormatDetections(std::span<const Detection> dets);
// Groups by image id, preserving file order within an image.
std::vector<ImageBoxes> ParseDetections(std::string_view text);

struct DetectOptions {
  std::filesystem::path fixtures;
  HeadVariant variant = HeadVariant::kAsym;
  int input_size = kDefaultInputSize;
  double conf_threshold = 0.001;
  NmsParams nms;
  int workers = 0;  // 0: hardware concurrency
  std::filesystem::path out;
};

struct DetectResult {
  std::vector<Detection> detections;  // sorted by image id, then rank
  std::vector<std::string> image_ids;
  std::vector<StageTiming> timing;    // per image, same order as image_ids
};

// Decodes and suppresses one image's head output. The asymmetric head goes
// through grouped NMS, the baseline through a single NMS pass.
std::vector<BBox> PostProcess(const HeadOutput& head, int input_size,
                              double conf_threshold, const NmsParams& nms);
std::vector<BBox> PostProcessOriginal(std::span<const OriginalHeadMap> head,
                                      int input_size, double conf_threshold,
                                      const NmsParams& nms);

// Runs head, decode and NMS over every image in the fixture directory;
// writes <out>/detections.txt and <out>/timing.txt.
DetectResult RunDetect(const DetectOptions& options);

struct EvalOptions {
  std::filesystem::path detections;
  std::filesystem::path labels;
  std::filesystem::path sizes;
  std::optional<std::filesystem::path> timing;
  std::vector<double> iou_thresholds = CocoIouThresholds();
  std::filesystem::path out;
};

std::vector<StageTiming> ParseTiming(std::string_view text);
std::string FormatTiming(std::span<const std::string> image_ids,
                         std::span<const StageTiming> timing);

// Writes <out>/metrics.txt and <out>/pr_curve.csv.
EvalReport RunEval(const EvalOptions& options);

struct StratifyOptions {
  std::filesystem::path labels;
  std::filesystem::path sizes;
  std::filesystem::path out;
};

struct StratifySummary {
  std::array<StratifiedSplit, 3> splits;  // square, wide, tall
  std::size_t total_images = 0;
  std::size_t total_labels = 0;
};

std::string FormatStratifySummary(const StratifySummary& summary);

// Writes <out>/{square,wide,tall}.txt image-id manifests and
// <out>/counts.txt.
StratifySummary RunStratify(const StratifyOptions& options);

}  // namespace asymdet

#endif  // ASYMDET_PIPELINE_H_
