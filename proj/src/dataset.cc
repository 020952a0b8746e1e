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

#include "asymdet/dataset.h"

#include <algorithm>
#include <charconv>
#include <set>
#include <sstream>
#include <unordered_map>

#include "asymdet/error.h"
#include "asymdet/files.h"

namespace asymdet {
namespace {

std::vector<std::string_view> SplitFields(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  if (sep == ' ') {
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
      std::size_t j = i;
      while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
      if (j > i) out.push_back(line.substr(i, j - i));
      i = j;
    }
    return out;
  }
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

template <typename T>
bool ParseNumber(std::string_view token, T& value) {
  const char* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, value);
  return ec == std::errc() && ptr == end;
}

std::string ShortestRepr(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

template <typename Fn>
void ForEachLine(std::string_view text, Fn&& fn) {
  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto pos = text.find('\n', start);
    const auto line = text.substr(start, pos == std::string_view::npos ? pos : pos - start);
    ++line_no;
    fn(line_no, line);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
}

}  // namespace

BBox LabelRecord::ToPixelBox() const {
  BBox b;
  b.cx = cx_n * image_w;
  b.cy = cy_n * image_h;
  b.w = pixel_w();
  b.h = pixel_h();
  b.class_id = class_id;
  b.confidence = 1.0;
  return b;
}

std::vector<LabelRecord> ParseLabels(std::string_view text,
                                     const std::string& image_id, int image_w,
                                     int image_h) {
  if (image_w <= 0 || image_h <= 0) {
    throw Error(ErrorKind::kValidation, image_id + ": image size must be positive");
  }
  std::vector<LabelRecord> labels;
  ForEachLine(text, [&](int line_no, std::string_view line) {
    const auto fields = SplitFields(line, ' ');
    if (fields.empty()) return;
    const auto where = image_id + " line " + std::to_string(line_no);
    LabelRecord r;
    r.image_id = image_id;
    r.image_w = image_w;
    r.image_h = image_h;
    if (fields.size() != 5 || !ParseNumber(fields[0], r.class_id) ||
        !ParseNumber(fields[1], r.cx_n) || !ParseNumber(fields[2], r.cy_n) ||
        !ParseNumber(fields[3], r.w_n) || !ParseNumber(fields[4], r.h_n)) {
      throw Error(ErrorKind::kParse,
                  where + ": expected 'class cx cy w h', got '" + std::string(line) + "'");
    }
    if (r.class_id < 0 || r.class_id >= kNumClasses) {
      throw Error(ErrorKind::kValidation,
                  where + ": class id " + std::to_string(r.class_id) + " outside [0, 80)");
    }
    const auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!in_unit(r.cx_n) || !in_unit(r.cy_n) || !in_unit(r.w_n) || !in_unit(r.h_n) ||
        !(r.w_n > 0) || !(r.h_n > 0)) {
      throw Error(ErrorKind::kValidation,
                  where + ": normalized coordinates must lie in [0, 1] with w, h > 0");
    }
    labels.push_back(std::move(r));
  });
  return labels;
}

std::string FormatLabels(std::span<const LabelRecord> labels) {
  std::string out;
  for (const auto& r : labels) {
    out += std::to_string(r.class_id) + ' ' + ShortestRepr(r.cx_n) + ' ' +
           ShortestRepr(r.cy_n) + ' ' + ShortestRepr(r.w_n) + ' ' +
           ShortestRepr(r.h_n) + '\n';
  }
  return out;
}

std::vector<ImageSize> ParseSizeManifest(std::string_view text) {
  std::vector<ImageSize> sizes;
  ForEachLine(text, [&](int line_no, std::string_view raw) {
    const auto line = Trim(raw);
    if (line.empty()) return;
    const auto fields = SplitFields(line, ',');
    if (line_no == 1 && fields.size() == 3 && Trim(fields[0]) == "image_id") return;
    ImageSize s;
    if (fields.size() != 3 || Trim(fields[0]).empty() ||
        !ParseNumber(Trim(fields[1]), s.width) || !ParseNumber(Trim(fields[2]), s.height)) {
      throw Error(ErrorKind::kParse, "size manifest line " + std::to_string(line_no) +
                                         ": expected 'image_id,width,height'");
    }
    if (s.width <= 0 || s.height <= 0) {
      throw Error(ErrorKind::kValidation,
                  "size manifest line " + std::to_string(line_no) + ": non-positive size");
    }
    s.image_id = std::string(Trim(fields[0]));
    sizes.push_back(std::move(s));
  });
  return sizes;
}

std::string FormatSizeManifest(std::span<const ImageSize> sizes) {
  std::string out = "image_id,width,height\n";
  for (const auto& s : sizes) {
    out += s.image_id + ',' + std::to_string(s.width) + ',' + std::to_string(s.height) + '\n';
  }
  return out;
}

std::size_t GroundTruthStore::label_count() const {
  std::size_t n = 0;
  for (const auto& img : images) n += img.labels.size();
  return n;
}

std::vector<ImageBoxes> GroundTruthStore::ToImageBoxes() const {
  std::vector<ImageBoxes> out;
  out.reserve(images.size());
  for (const auto& img : images) {
    ImageBoxes ib{img.image_id, {}};
    for (const auto& r : img.labels) ib.boxes.push_back(r.ToPixelBox());
    out.push_back(std::move(ib));
  }
  return out;
}

GroundTruthStore FullValidationSet(std::vector<ImageLabels> images) {
  std::sort(images.begin(), images.end(),
            [](const ImageLabels& a, const ImageLabels& b) { return a.image_id < b.image_id; });
  return GroundTruthStore{std::move(images)};
}

GroundTruthStore LoadGroundTruth(const std::filesystem::path& label_dir,
                                 const std::filesystem::path& size_manifest) {
  namespace fs = std::filesystem;
  if (!fs::is_regular_file(size_manifest)) {
    throw Error(ErrorKind::kConfig, "missing size manifest: " + size_manifest.string());
  }
  const auto sizes = ParseSizeManifest(ReadTextFile(size_manifest));
  std::unordered_map<std::string, std::size_t> by_id;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (!by_id.emplace(sizes[i].image_id, i).second) {
      throw Error(ErrorKind::kConfig, "duplicate image id in size manifest: " +
                                          sizes[i].image_id);
    }
  }

  std::vector<ImageLabels> images(sizes.size());
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    images[i].image_id = sizes[i].image_id;
    images[i].width = sizes[i].width;
    images[i].height = sizes[i].height;
  }
  if (fs::is_directory(label_dir)) {
    for (const auto& entry : fs::directory_iterator(label_dir)) {
      if (!entry.is_regular_file() || entry.path().extension() != ".txt") continue;
      const std::string id = entry.path().stem().string();
      const auto it = by_id.find(id);
      if (it == by_id.end()) {
        throw Error(ErrorKind::kConfig, "label file without size manifest entry: " +
                                            entry.path().string());
      }
      auto& img = images[it->second];
      img.labels = ParseLabels(ReadTextFile(entry.path()), id, img.width, img.height);
    }
  } else if (fs::exists(label_dir)) {
    throw Error(ErrorKind::kConfig, "not a label directory: " + label_dir.string());
  }
  return FullValidationSet(std::move(images));
}

StratifiedSplit Stratify(std::span<const ImageLabels> images, ShapeClass target) {
  StratifiedSplit split;
  split.shape = target;
  std::set<std::string> ids;
  for (const auto& img : images) {
    bool kept = false;
    for (const auto& r : img.labels) {
      if (ClassifyShape(r.pixel_w(), r.pixel_h()) == target) {
        split.labels.push_back(r);
        kept = true;
      }
    }
    if (kept) ids.insert(img.image_id);
  }
  split.image_ids.assign(ids.begin(), ids.end());
  return split;
}

}  // namespace asymdet
