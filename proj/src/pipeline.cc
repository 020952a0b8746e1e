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

#include "asymdet/pipeline.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "asymdet/error.h"
#include "asymdet/files.h"
#include "asymdet/random.h"
#include "asymdet/tensor_io.h"

namespace asymdet {
namespace fs = std::filesystem;

namespace {

constexpr std::array<Level, 3> kLevels = {Level::kP3, Level::kP4, Level::kP5};

std::string LowerLevel(Level level) {
  std::string s(LevelName(level));
  s[0] = 'p';
  return s;
}

// Runs fn(i) for i in [0, n) on up to `workers` threads and rethrows the
// first failure.
template <typename Fn>
void ParallelFor(std::size_t n, int workers, Fn&& fn) {
  std::size_t threads = workers > 0 ? static_cast<std::size_t>(workers)
                                    : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  std::vector<std::jthread> pool;
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mu);
          if (!failure) failure = std::current_exception();
          next = n;
        }
      }
    });
  }
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

double MillisSince(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
      .count();
}

Tensor RandomTensor(Rng& rng, std::size_t c, std::size_t h, std::size_t w, double k) {
  std::vector<double> data(c * h * w);
  for (double& v : data) v = static_cast<float>(rng.Uniform(-k, k));
  return Tensor(c, h, w, std::move(data));
}

std::string Fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::vector<std::string> ListImageIds(const fs::path& fixtures) {
  const fs::path dir = fixtures / fixture::kImagesDir;
  if (!fs::is_directory(dir)) {
    throw Error(ErrorKind::kIo, "missing fixture image directory: " + dir.string());
  }
  std::vector<std::string> ids;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_directory()) ids.push_back(entry.path().filename().string());
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

void EnsureDirectory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw Error(ErrorKind::kIo, "cannot create directory: " + dir.string());
  }
}

std::vector<LabelRecord> SyntheticLabels(Rng& rng, const std::string& id, int size) {
  std::vector<LabelRecord> labels;
  const auto count = rng.Int(1, 6);
  for (std::int64_t n = 0; n < count; ++n) {
    LabelRecord r;
    r.image_id = id;
    r.image_w = size;
    r.image_h = size;
    r.class_id = static_cast<int>(rng.Int(0, 9));
    // Mix of square-ish, wide and tall boxes.
    const double base = rng.Uniform(0.03, 0.35);
    const double aspect = std::exp(rng.Uniform(std::log(0.25), std::log(4.0)));
    r.w_n = std::min(0.9, base * std::sqrt(aspect));
    r.h_n = std::min(0.9, base / std::sqrt(aspect));
    r.cx_n = rng.Uniform(r.w_n / 2, 1 - r.w_n / 2);
    r.cy_n = rng.Uniform(r.h_n / 2, 1 - r.h_n / 2);
    labels.push_back(r);
  }
  return labels;
}

}  // namespace

namespace fixture {

std::string WeightFile(HeadVariant variant, Level level) {
  return std::string(variant == HeadVariant::kOriginal ? "original_" : "") + "head_w_" +
         LowerLevel(level) + ".ast";
}

std::string BiasFile(HeadVariant variant, Level level) {
  return std::string(variant == HeadVariant::kOriginal ? "original_" : "") + "head_b_" +
         LowerLevel(level) + ".ast";
}

std::string AnchorFile(HeadVariant variant) {
  return variant == HeadVariant::kOriginal ? "original_anchors.txt" : "anchors.txt";
}

std::string NeckFile(Level level) { return "neck_" + LowerLevel(level) + ".ast"; }

}  // namespace fixture

HeadConfig RandomHeadConfig(HeadVariant variant, std::uint64_t seed, int input_size) {
  HeadConfig config = ZeroHeadConfig(variant, input_size);
  const std::size_t out = config.out_channels();
  for (std::size_t l = 0; l < 3; ++l) {
    Rng rng(seed, (std::uint64_t{1} << 40) + 10 * static_cast<std::uint64_t>(variant) + l);
    const std::size_t fan_in = kNeckChannels[l];
    const double k = 1.0 / std::sqrt(static_cast<double>(fan_in));
    std::vector<double> w(out * fan_in);
    for (double& v : w) v = static_cast<float>(rng.Uniform(-k, k));
    config.levels[l].weights = Matrix(out, fan_in, std::move(w));
    for (double& b : config.levels[l].bias) b = static_cast<float>(rng.Uniform(-k, k));
  }
  return config;
}

void Synthesize(const SynthOptions& options) {
  if (options.image_count < 0) {
    throw Error(ErrorKind::kConfig, "image count must be >= 0");
  }
  if (options.input_size <= 0 || options.input_size % 32 != 0) {
    throw Error(ErrorKind::kConfig, "input size must be a positive multiple of 32");
  }
  EnsureDirectory(options.out);
  EnsureDirectory(options.out / fixture::kImagesDir);
  EnsureDirectory(options.out / fixture::kLabelsDir);

  for (HeadVariant variant : {HeadVariant::kAsym, HeadVariant::kOriginal}) {
    const HeadConfig config = options.zero_weights
                                  ? ZeroHeadConfig(variant, options.input_size)
                                  : RandomHeadConfig(variant, options.seed, options.input_size);
    for (std::size_t l = 0; l < 3; ++l) {
      const auto& lw = config.levels[l];
      SaveTensor(options.out / fixture::WeightFile(variant, kLevels[l]),
                 TensorFromMatrix(lw.weights));
      SaveTensor(options.out / fixture::BiasFile(variant, kLevels[l]),
                 Tensor(lw.bias.size(), 1, 1, lw.bias));
    }
    WriteTextFile(options.out / fixture::AnchorFile(variant),
                  FormatAnchorConfig(config.anchors));
  }

  std::vector<ImageSize> sizes;
  for (int i = 0; i < options.image_count; ++i) {
    char id[32];
    std::snprintf(id, sizeof(id), "img%05d", i);
    const fs::path image_dir = options.out / fixture::kImagesDir / id;
    EnsureDirectory(image_dir);
    Rng rng(options.seed, static_cast<std::uint64_t>(i));
    for (std::size_t l = 0; l < 3; ++l) {
      const auto side = static_cast<std::size_t>(options.input_size / LevelStride(kLevels[l]));
      SaveTensor(image_dir / fixture::NeckFile(kLevels[l]),
                 RandomTensor(rng, kNeckChannels[l], side, side, 1.0));
    }
    const auto labels = SyntheticLabels(rng, id, options.input_size);
    WriteTextFile(options.out / fixture::kLabelsDir / (std::string(id) + ".txt"),
                  FormatLabels(labels));
    sizes.push_back({id, options.input_size, options.input_size});
  }
  WriteTextFile(options.out / fixture::kSizeManifest, FormatSizeManifest(sizes));
}

HeadConfig LoadHeadConfig(const fs::path& fixture_dir, HeadVariant variant, int input_size) {
  HeadConfig config = ZeroHeadConfig(variant, input_size);
  for (std::size_t l = 0; l < 3; ++l) {
    config.levels[l].weights =
        MatrixFromTensor(LoadTensor(fixture_dir / fixture::WeightFile(variant, kLevels[l])));
    const Tensor bias = LoadTensor(fixture_dir / fixture::BiasFile(variant, kLevels[l]));
    config.levels[l].bias.assign(bias.data().begin(), bias.data().end());
  }
  const fs::path anchors = fixture_dir / fixture::AnchorFile(variant);
  if (fs::exists(anchors)) config.anchors = ParseAnchorConfig(ReadTextFile(anchors));
  ValidateHeadConfig(config);
  return config;
}

NeckMaps LoadNeckMaps(const fs::path& image_dir) {
  return NeckMaps{{LoadTensor(image_dir / fixture::NeckFile(Level::kP3)),
                   LoadTensor(image_dir / fixture::NeckFile(Level::kP4)),
                   LoadTensor(image_dir / fixture::NeckFile(Level::kP5))}};
}

std::string FormatDetections(std::span<const Detection> dets) {
  std::string out;
  for (const auto& d : dets) {
    const BBox& b = d.box;
    out += d.image_id + ' ' + std::to_string(b.class_id) + ' ' + Fixed(b.confidence, 6) +
           ' ' + Fixed(b.cx, 3) + ' ' + Fixed(b.cy, 3) + ' ' + Fixed(b.w, 3) + ' ' +
           Fixed(b.h, 3) + ' ' +
           (b.branch ? std::string(ShapeClassName(*b.branch)) : std::string("-")) + '\n';
  }
  return out;
}

std::vector<ImageBoxes> ParseDetections(std::string_view text) {
  std::vector<ImageBoxes> images;
  std::map<std::string, std::size_t> index;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string id;
    if (!(fields >> id)) continue;
    BBox b;
    std::string branch;
    std::string extra;
    if (!(fields >> b.class_id >> b.confidence >> b.cx >> b.cy >> b.w >> b.h >> branch) ||
        (fields >> extra)) {
      throw Error(ErrorKind::kParse, "detections line " + std::to_string(line_no) +
                                         ": expected 'image_id class_id conf cx cy w h branch'");
    }
    if (branch != "-") {
      b.branch = ParseShapeClass(branch);
      if (!b.branch) {
        throw Error(ErrorKind::kParse,
                    "detections line " + std::to_string(line_no) + ": bad branch " + branch);
      }
    }
    if (!IsValid(b)) {
      throw Error(ErrorKind::kValidation,
                  "detections line " + std::to_string(line_no) + ": invalid box");
    }
    auto [it, inserted] = index.emplace(id, images.size());
    if (inserted) images.push_back({id, {}});
    images[it->second].boxes.push_back(b);
  }
  return images;
}

std::vector<BBox> PostProcess(const HeadOutput& head, int input_size, double conf_threshold,
                              const NmsParams& nms) {
  DetectionSet set;
  for (const auto& map : head.maps) {
    const auto boxes =
        Decode(map.raw, map.anchor, MakeGridGeometry(map.anchor, input_size), conf_threshold);
    set.boxes.insert(set.boxes.end(), boxes.begin(), boxes.end());
  }
  return GroupedNms(set, nms);
}

std::vector<BBox> PostProcessOriginal(std::span<const OriginalHeadMap> head, int input_size,
                                      double conf_threshold, const NmsParams& nms) {
  std::vector<BBox> all;
  for (const auto& map : head) {
    for (std::size_t k = 0; k < 3; ++k) {
      const AnchorSpec& anchor = map.anchors[k];
      const auto boxes = Decode(AnchorSlice(map.raw, k), anchor,
                                MakeGridGeometry(anchor, input_size), conf_threshold);
      all.insert(all.end(), boxes.begin(), boxes.end());
    }
  }
  return Nms(all, nms);
}

DetectResult RunDetect(const DetectOptions& options) {
  if (!(options.conf_threshold >= 0.0 && options.conf_threshold <= 1.0)) {
    throw Error(ErrorKind::kConfig, "confidence threshold must be in [0, 1]");
  }
  ValidateNmsParams(options.nms);
  const HeadConfig config = LoadHeadConfig(options.fixtures, options.variant, options.input_size);

  DetectResult result;
  result.image_ids = ListImageIds(options.fixtures);
  const std::size_t n = result.image_ids.size();
  std::vector<std::vector<BBox>> per_image(n);
  result.timing.resize(n);

  ParallelFor(n, options.workers, [&](std::size_t i) {
    StageTiming& t = result.timing[i];
    auto start = std::chrono::steady_clock::now();
    const NeckMaps neck =
        LoadNeckMaps(options.fixtures / fixture::kImagesDir / result.image_ids[i]);
    t.pre_process_ms = MillisSince(start);

    start = std::chrono::steady_clock::now();
    if (options.variant == HeadVariant::kAsym) {
      const HeadOutput head = RunHead(neck, config);
      t.inference_ms = MillisSince(start);
      start = std::chrono::steady_clock::now();
      per_image[i] = PostProcess(head, options.input_size, options.conf_threshold, options.nms);
    } else {
      const auto head = RunOriginalHead(neck, config);
      t.inference_ms = MillisSince(start);
      start = std::chrono::steady_clock::now();
      per_image[i] =
          PostProcessOriginal(head, options.input_size, options.conf_threshold, options.nms);
    }
    t.nms_ms = MillisSince(start);
  });

  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& b : per_image[i]) result.detections.push_back({result.image_ids[i], b});
  }

  EnsureDirectory(options.out);
  WriteTextFile(options.out / "detections.txt", FormatDetections(result.detections));
  WriteTextFile(options.out / "timing.txt", FormatTiming(result.image_ids, result.timing));
  return result;
}

std::string FormatTiming(std::span<const std::string> image_ids,
                         std::span<const StageTiming> timing) {
  std::string out;
  for (std::size_t i = 0; i < timing.size(); ++i) {
    out += image_ids[i] + ' ' + Fixed(timing[i].pre_process_ms, 3) + ' ' +
           Fixed(timing[i].inference_ms, 3) + ' ' + Fixed(timing[i].nms_ms, 3) + '\n';
  }
  return out;
}

std::vector<StageTiming> ParseTiming(std::string_view text) {
  std::vector<StageTiming> out;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string id;
    if (!(fields >> id)) continue;
    StageTiming t;
    if (!(fields >> t.pre_process_ms >> t.inference_ms >> t.nms_ms)) {
      throw Error(ErrorKind::kParse, "timing line " + std::to_string(line_no) +
                                         ": expected 'image_id pre_ms inference_ms nms_ms'");
    }
    out.push_back(t);
  }
  return out;
}

EvalReport RunEval(const EvalOptions& options) {
  const GroundTruthStore gt = LoadGroundTruth(options.labels, options.sizes);
  const auto preds = ParseDetections(ReadTextFile(options.detections));
  const auto gt_boxes = gt.ToImageBoxes();
  EvalReport report = MapAt(preds, gt_boxes, options.iou_thresholds);
  if (options.timing) {
    const auto timing = ParseTiming(ReadTextFile(*options.timing));
    if (!timing.empty()) report.timing = SummarizeTiming(timing);
  }
  EnsureDirectory(options.out);
  WriteTextFile(options.out / "metrics.txt", FormatReport(report));
  WriteTextFile(options.out / "pr_curve.csv", FormatPrCurveCsv(report));
  return report;
}

std::string FormatStratifySummary(const StratifySummary& s) {
  std::ostringstream out;
  for (const auto& split : s.splits) {
    out << ShapeClassName(split.shape) << " images=" << split.image_ids.size()
        << " labels=" << split.labels.size() << '\n';
  }
  out << "all images=" << s.total_images << " labels=" << s.total_labels << '\n';
  return out.str();
}

StratifySummary RunStratify(const StratifyOptions& options) {
  const GroundTruthStore gt = LoadGroundTruth(options.labels, options.sizes);
  StratifySummary summary;
  summary.total_images = gt.images.size();
  summary.total_labels = gt.label_count();
  const std::array<ShapeClass, 3> shapes = {ShapeClass::kSquare, ShapeClass::kWide,
                                            ShapeClass::kTall};
  EnsureDirectory(options.out);
  for (std::size_t k = 0; k < 3; ++k) {
    summary.splits[k] = Stratify(gt.images, shapes[k]);
    std::string manifest;
    for (const auto& id : summary.splits[k].image_ids) manifest += id + '\n';
    WriteTextFile(options.out / (std::string(ShapeClassName(shapes[k])) + ".txt"), manifest);
  }
  WriteTextFile(options.out / "counts.txt", FormatStratifySummary(summary));
  return summary;
}

}  // namespace asymdet
