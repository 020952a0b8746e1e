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

#include "asymdet/nms.h"

#include <algorithm>
#include <array>
#include <numeric>

#include "asymdet/error.h"

namespace asymdet {

void ValidateNmsParams(const NmsParams& params) {
  if (!(params.iou_threshold > 0.0 && params.iou_threshold < 1.0)) {
    throw Error(ErrorKind::kConfig,
                "NMS IoU threshold must be in (0, 1), got " +
                    std::to_string(params.iou_threshold));
  }
}

std::vector<BBox> Nms(std::span<const BBox> boxes, const NmsParams& params) {
  ValidateNmsParams(params);
  std::vector<std::size_t> order(boxes.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (boxes[a].confidence != boxes[b].confidence) {
      return boxes[a].confidence > boxes[b].confidence;
    }
    return boxes[a].class_id < boxes[b].class_id;
  });

  std::vector<BBox> kept;
  for (std::size_t idx : order) {
    if (kept.size() >= params.max_detections) break;
    const BBox& candidate = boxes[idx];
    const bool suppressed =
        std::any_of(kept.begin(), kept.end(), [&](const BBox& k) {
          if (params.per_class && k.class_id != candidate.class_id) return false;
          return Iou(k, candidate) >= params.iou_threshold;
        });
    if (!suppressed) kept.push_back(candidate);
  }
  return kept;
}

std::vector<BBox> GroupedNms(const DetectionSet& dets, const NmsParams& params) {
  std::array<std::vector<BBox>, 3> groups;
  for (const auto& b : dets.boxes) {
    if (!b.branch) {
      throw Error(ErrorKind::kValidation,
                  "grouped NMS: untagged box in image " + dets.image_id);
    }
    groups[static_cast<std::size_t>(*b.branch)].push_back(b);
  }
  std::vector<BBox> fused;
  for (const auto& g : groups) {
    auto survivors = Nms(g, params);
    fused.insert(fused.end(), survivors.begin(), survivors.end());
  }
  return Nms(fused, params);
}

}  // namespace asymdet
