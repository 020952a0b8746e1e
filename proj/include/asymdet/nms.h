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

#ifndef ASYMDET_NMS_H_
#define ASYMDET_NMS_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "asymdet/boxes.h"

namespace asymdet {

struct NmsParams {
  double iou_threshold = 0.45;
  bool per_class = true;
  std::size_t max_detections = 300;
};

// Throws kConfig unless iou_threshold is in (0, 1).
void ValidateNmsParams(const NmsParams& params);

// Candidate boxes of one image; every box carries the branch that
// produced it.
struct DetectionSet {
  std::string image_id;
  std::vector<BBox> boxes;
};

// Greedy suppression. Boxes are ranked by confidence (descending), then
// class id, then input position; a box survives iff its IoU with every
// earlier survivor (of the same class when per_class) is below the
// threshold. Stops after max_detections survivors. Survivors are returned
// in rank order, unmodified.
std::vector<BBox> Nms(std::span<const BBox> boxes, const NmsParams& params);

// Four passes: one NMS per branch group (square, wide, tall), then one
// NMS over the concatenation of the three results. Throws kValidation if
// a box has no branch tag.
std::vector<BBox> GroupedNms(const DetectionSet& dets, const NmsParams& params);

}  // namespace asymdet

#endif  // ASYMDET_NMS_H_
