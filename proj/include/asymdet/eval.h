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

#ifndef ASYMDET_EVAL_H_
#define ASYMDET_EVAL_H_

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "asymdet/boxes.h"

namespace asymdet {

// True negatives are not defined for detection.
struct ConfusionCounts {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;

  bool operator==(const ConfusionCounts&) const = default;
};

struct PrecisionRecall {
  double precision = 0;
  double recall = 0;
};

// TP / (TP + FP) and TP / (TP + FN), with 0/0 taken as 0.
PrecisionRecall ComputePrecisionRecall(const ConfusionCounts& counts);

struct MatchResult {
  std::vector<bool> is_tp;       // one flag per prediction
  std::vector<int> matched_gt;   // GT index per prediction, -1 if FP
  std::int64_t unmatched_gt = 0;
};

// Greedy matching for one image. `preds` must already be sorted by
// confidence, highest first. Each prediction takes the unmatched GT of its
// class with the largest IoU >= iou_threshold (lowest index on ties).
MatchResult MatchDetections(std::span<const BBox> preds,
                            std::span<const BBox> gts, double iou_threshold);

inline constexpr int kRecallSamples = 101;
using PrCurve = std::array<double, kRecallSamples>;

// Recall sample points 0, 0.01, ..., 1.
double RecallSample(int i);

// Interpolated precision at each recall sample: the largest precision
// reached at any point whose recall is >= the sample. `flags` is ordered by
// descending confidence; total_gt must be > 0.
PrCurve InterpolatedPrecision(const std::vector<bool>& flags, std::int64_t total_gt);

// Mean of the 101 interpolated precisions. Empty when total_gt == 0, in
// which case the class is left out of any mean.
std::optional<double> AveragePrecision(const std::vector<bool>& flags,
                                       std::int64_t total_gt);

struct ImageBoxes {
  std::string image_id;
  std::vector<BBox> boxes;
};

// 0.50, 0.55, ..., 0.95.
std::vector<double> CocoIouThresholds();

struct TimingReport {
  double pre_process_ms = 0;
  double inference_ms = 0;
  double nms_ms = 0;
};

struct EvalReport {
  std::vector<int> classes;  // classes present in ground truth
  std::map<int, double> ap50;
  std::map<int, double> ap_mean;  // mean over iou_thresholds
  std::vector<double> iou_thresholds;
  std::vector<double> map_per_threshold;
  double map50 = 0;
  double map5095 = 0;
  // Operating point with the best F1 over all classes at IoU 0.5.
  double precision = 0;
  double recall = 0;
  double operating_confidence = 0;
  ConfusionCounts counts;
  std::map<int, PrCurve> pr_curve;  // at IoU 0.5
  std::size_t num_images = 0;
  std::size_t num_gt = 0;
  std::size_t num_predictions = 0;
  std::optional<TimingReport> timing;
};

// Evaluates predictions against ground truth. Throws kEmptyDataset when the
// ground truth holds no boxes and kValidation for predictions on an image
// missing from the ground truth. mAP@0.5 always uses IoU 0.5; map5095
// averages over `iou_thresholds`.
EvalReport MapAt(std::span<const ImageBoxes> preds, std::span<const ImageBoxes> gts,
                 std::span<const double> iou_thresholds);

struct StageTiming {
  double pre_process_ms = 0;
  double inference_ms = 0;
  double nms_ms = 0;
};

// Per-stage means, rounded to 0.1 ms. Throws kValidation on empty input.
TimingReport SummarizeTiming(std::span<const StageTiming> per_image);

// One "key=value" per line: P, R, mAP@0.5, mAP@.5:.95, then timing (keys
// prefixed "time."), then counts and per-class APs.
std::string FormatReport(const EvalReport& report);

// "class_id,recall,precision" header plus 101 rows per class.
std::string FormatPrCurveCsv(const EvalReport& report);

}  // namespace asymdet

#endif  // ASYMDET_EVAL_H_
