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

#ifndef ASYMDET_DATASET_H_
#define ASYMDET_DATASET_H_

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "asymdet/boxes.h"
#include "asymdet/eval.h"

namespace asymdet {

// One line of a YOLO-format label file, plus the image size needed to
// denormalize it.
struct LabelRecord {
  int class_id = 0;
  double cx_n = 0;
  double cy_n = 0;
  double w_n = 0;
  double h_n = 0;
  std::string image_id;
  int image_w = 0;
  int image_h = 0;

  double pixel_w() const { return w_n * image_w; }
  double pixel_h() const { return h_n * image_h; }
  BBox ToPixelBox() const;

  bool operator==(const LabelRecord&) const = default;
};

// Parses "class cx cy w h" lines. Blank lines are skipped. Throws kParse
// (with the 1-based line number) for malformed lines and kValidation for
// out-of-range values.
std::vector<LabelRecord> ParseLabels(std::string_view text,
                                     const std::string& image_id, int image_w,
                                     int image_h);

// Inverse of ParseLabels; numbers use the shortest exact representation.
std::string FormatLabels(std::span<const LabelRecord> labels);

struct ImageSize {
  std::string image_id;
  int width = 0;
  int height = 0;
};

// CSV rows "image_id,width,height"; an optional header row with those
// names is skipped.
std::vector<ImageSize> ParseSizeManifest(std::string_view text);
std::string FormatSizeManifest(std::span<const ImageSize> sizes);

struct ImageLabels {
  std::string image_id;
  int width = 0;
  int height = 0;
  std::vector<LabelRecord> labels;
};

struct GroundTruthStore {
  std::vector<ImageLabels> images;  // sorted by image id

  std::size_t label_count() const;
  std::vector<ImageBoxes> ToImageBoxes() const;
};

// Every image and every label, unfiltered, ordered by image id.
GroundTruthStore FullValidationSet(std::vector<ImageLabels> images);

// Reads `<label_dir>/<image_id>.txt` for every manifest entry (a missing
// file means an image without labels). A label file whose image is absent
// from the manifest, or a missing manifest, is a kConfig error.
GroundTruthStore LoadGroundTruth(const std::filesystem::path& label_dir,
                                 const std::filesystem::path& size_manifest);

struct StratifiedSplit {
  ShapeClass shape = ShapeClass::kSquare;
  std::vector<std::string> image_ids;
  std::vector<LabelRecord> labels;
};

// Keeps labels whose pixel aspect ratio falls in `target`; an image is kept
// when at least one of its labels is.
StratifiedSplit Stratify(std::span<const ImageLabels> images, ShapeClass target);

}  // namespace asymdet

#endif  // ASYMDET_DATASET_H_
