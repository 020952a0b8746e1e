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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Optional data-dependent criteria print SKIP when their inputs
// are absent.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "asymdet/anchors.h"
#include "asymdet/dataset.h"
#include "asymdet/error.h"
#include "asymdet/eval.h"
#include "asymdet/files.h"
#include "asymdet/head.h"
#include "asymdet/nms.h"
#include "asymdet/pipeline.h"
#include "asymdet/random.h"
#include "asymdet/tensor.h"
#include "oracles.h"

namespace asymdet {
namespace {

namespace fs = std::filesystem;

enum class Outcome { kPass, kFail, kSkip };

struct Verdict {
  Outcome outcome = Outcome::kPass;
  std::string detail;
};

Verdict Pass(std::string detail = "") { return {Outcome::kPass, std::move(detail)}; }
Verdict Fail(std::string detail) { return {Outcome::kFail, std::move(detail)}; }
Verdict Skip(std::string detail) { return {Outcome::kSkip, std::move(detail)}; }

struct Criterion {
  std::string name;
  double limit_s;  // 0: no limit
  std::function<Verdict()> check;
};

std::string Fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, v);
  return buf;
}

Verdict ShapeSuite() {
  const NeckMaps neck{{Tensor(256, 80, 80), Tensor(512, 40, 40), Tensor(1024, 20, 20)}};
  const HeadOutput out = RunHead(neck, ZeroHeadConfig(HeadVariant::kAsym, 640));
  const std::vector<std::string> expected = {"85x20x20", "85x20x19", "85x19x20",
                                             "85x40x40", "85x40x39", "85x39x40",
                                             "85x80x80", "85x80x79", "85x79x80"};
  if (out.maps.size() != expected.size()) return Fail("map count");
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (out.maps[i].raw.ShapeString() != expected[i]) {
      return Fail("map " + std::to_string(i) + " is " + out.maps[i].raw.ShapeString());
    }
  }
  return Pass();
}

Verdict PoolingOracle() {
  Rng rng(1);
  const std::size_t kernels[3][2] = {{1, 2}, {2, 1}, {2, 2}};
  double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    const bool largest = i % 100 == 0;
    const auto c = largest ? 85 : static_cast<std::size_t>(rng.Int(1, 85));
    const auto h = largest ? 80 : static_cast<std::size_t>(rng.Int(2, 80));
    const auto w = largest ? 80 : static_cast<std::size_t>(rng.Int(2, 80));
    const Tensor t = oracle::RandomTensor(rng, c, h, w, -10, 10);
    const auto& k = kernels[i % 3];
    const Tensor got = AvgPool(t, Window2d{k[0], k[1]}, Window2d{1, 1});
    const Tensor want = oracle::NaiveAvgPool(t, k[0], k[1], 1, 1);
    if (got.ShapeString() != want.ShapeString()) return Fail("shape mismatch");
    worst = std::max(worst, oracle::MaxAbsDiff(got, want));
  }
  if (!(worst < 1e-12)) return Fail("max abs diff " + Fmt("%.3g", worst));
  return Pass("max abs diff " + Fmt("%.3g", worst));
}

Verdict DecodeRoundTrip() {
  Rng rng(2);
  std::size_t cells = 0;
  double worst = 0;
  while (cells < 10000) {
    for (const auto& spec : NewAnchorSet()) {
      const auto g = MakeGridGeometry(spec, 320);
      const auto rows = static_cast<std::size_t>(g.rows);
      const auto cols = static_cast<std::size_t>(g.cols);
      const Tensor raw = oracle::RandomTensor(rng, kBoxChannels, rows, cols, -4, 4);
      const auto boxes = Decode(raw, spec, g, 0.0);
      if (boxes.size() != rows * cols) return Fail("box count");
      for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
          const BoxLogits t = Encode(boxes[i * cols + j], spec, g, static_cast<int>(i),
                                     static_cast<int>(j));
          worst = std::max({worst, std::abs(t.tx - raw.at(0, i, j)),
                            std::abs(t.ty - raw.at(1, i, j)), std::abs(t.tw - raw.at(2, i, j)),
                            std::abs(t.th - raw.at(3, i, j))});
        }
      }
      cells += rows * cols;
    }
  }
  if (!(worst < 1e-6)) return Fail("max error " + Fmt("%.3g", worst));
  return Pass(std::to_string(cells) + " cells, max error " + Fmt("%.3g", worst));
}

Verdict NmsOracle() {
  Rng rng(3);
  for (int seed = 0; seed < 1000; ++seed) {
    const auto boxes = oracle::RandomNmsSet(rng, 30);
    NmsParams p;
    p.iou_threshold = rng.Uniform(0.1, 0.9);
    p.per_class = rng.Bernoulli(0.5);
    p.max_detections = static_cast<std::size_t>(rng.Int(1, 35));
    const std::string where = "case " + std::to_string(seed);

    const auto plain = Nms(boxes, p);
    if (plain != oracle::BruteNms(boxes, p)) return Fail(where + ": nms differs");
    if (Nms(plain, p) != plain) return Fail(where + ": nms not idempotent");
    if (!oracle::ConflictFree(plain, p)) return Fail(where + ": nms conflict");

    const DetectionSet set{"img", boxes};
    const auto grouped = GroupedNms(set, p);
    if (grouped != oracle::BruteGroupedNms(boxes, p)) return Fail(where + ": grouped differs");
    if (GroupedNms({"img", grouped}, p) != grouped) {
      return Fail(where + ": grouped not idempotent");
    }
    if (!oracle::ConflictFree(grouped, p)) return Fail(where + ": grouped conflict");
  }
  return Pass();
}

Verdict ApOracle() {
  Rng rng(4);
  const auto thresholds = CocoIouThresholds();
  double worst = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::string where = "dataset " + std::to_string(trial);
    const auto d = oracle::RandomToyDataset(rng);

    const auto report = MapAt(d.preds, d.gts, thresholds);
    const auto expected = oracle::BruteMap(d.preds, d.gts, thresholds);
    worst = std::max({worst, std::abs(report.map50 - expected.map50),
                      std::abs(report.map5095 - expected.map_mean)});
    for (const auto& [cls, ap] : expected.ap50) {
      worst = std::max(worst, std::abs(report.ap50.at(cls) - ap));
    }

    std::vector<ImageBoxes> perfect = d.gts;
    for (auto& image : perfect) {
      for (auto& b : image.boxes) b.confidence = 1.0;
    }
    const auto best = MapAt(perfect, d.gts, thresholds);
    if (best.map50 != 1.0 || best.map5095 != 1.0) return Fail(where + ": perfect != 1");
    const auto none = MapAt({}, d.gts, thresholds);
    if (none.map50 != 0.0 || none.map5095 != 0.0) return Fail(where + ": empty != 0");

    // Flag sequences of the same size, scored directly.
    const auto n = rng.Int(0, 10);
    std::vector<bool> flags;
    std::int64_t tp = 0;
    for (std::int64_t i = 0; i < n; ++i) {
      flags.push_back(rng.Bernoulli(0.5));
      tp += flags.back();
    }
    const std::int64_t total = std::max<std::int64_t>(1, tp + rng.Int(0, 3));
    worst = std::max(worst, std::abs(*AveragePrecision(flags, total) -
                                     oracle::BruteAp(flags, total)));
  }
  if (!(worst < 1e-9)) return Fail("max error " + Fmt("%.3g", worst));
  return Pass("max error " + Fmt("%.3g", worst));
}

Verdict PrecisionRecallCases() {
  const auto a = ComputePrecisionRecall({10, 0, 0});
  const auto b = ComputePrecisionRecall({3, 1, 2});
  if (a.precision != 1.0 || a.recall != 1.0) return Fail("(10,0,0)");
  if (b.precision != 0.75 || b.recall != 0.6) return Fail("(3,1,2)");
  return Pass();
}

Verdict ParameterCount() {
  const HeadConfig asym = ZeroHeadConfig(HeadVariant::kAsym);
  const std::size_t head = HeadParameterCount(asym);
  const std::size_t conv = ConvParameterCount(asym);
  if (head != conv) return Fail(std::to_string(head) + " != " + std::to_string(conv));
  return Pass(std::to_string(head) + " parameters");
}

using LabelKey = std::tuple<std::string, int, double, double, double, double>;

LabelKey KeyOf(const LabelRecord& r) {
  return {r.image_id, r.class_id, r.cx_n, r.cy_n, r.w_n, r.h_n};
}

Verdict StratificationPartition(const fs::path& scratch) {
  SynthOptions o;
  o.seed = 11;
  o.image_count = 200;
  o.input_size = 64;
  o.out = scratch / "strat";
  Synthesize(o);
  const auto gt = LoadGroundTruth(o.out / fixture::kLabelsDir, o.out / fixture::kSizeManifest);
  std::multiset<LabelKey> all;
  for (const auto& img : gt.images) {
    for (const auto& r : img.labels) all.insert(KeyOf(r));
  }
  std::multiset<LabelKey> seen;
  std::size_t nonempty = 0;
  for (ShapeClass s : {ShapeClass::kSquare, ShapeClass::kWide, ShapeClass::kTall}) {
    const auto split = Stratify(gt.images, s);
    nonempty += !split.labels.empty();
    for (const auto& r : split.labels) {
      if (seen.count(KeyOf(r))) return Fail("label in two splits");
      seen.insert(KeyOf(r));
    }
    std::vector<ImageLabels> kept;
    for (const auto& img : gt.images) {
      ImageLabels sub{img.image_id, img.width, img.height, {}};
      for (const auto& r : split.labels) {
        if (r.image_id == img.image_id) sub.labels.push_back(r);
      }
      kept.push_back(std::move(sub));
    }
    const auto again = Stratify(kept, s);
    if (again.labels != split.labels || again.image_ids != split.image_ids) {
      return Fail(std::string(ShapeClassName(s)) + " not idempotent");
    }
  }
  if (seen != all) return Fail("splits do not cover every label");
  if (nonempty != 3) return Fail("fixture lacks one of the shapes");
  return Pass(std::to_string(all.size()) + " labels");
}

Verdict CocoCounts(const fs::path& scratch) {
  const char* labels = std::getenv("ASYMDET_COCO_LABELS");
  const char* sizes = std::getenv("ASYMDET_COCO_SIZES");
  if (!labels || !sizes) return Skip("set ASYMDET_COCO_LABELS and ASYMDET_COCO_SIZES");
  const auto summary = RunStratify({labels, sizes, scratch / "coco"});
  struct Target {
    const char* what;
    double got;
    double want;
  };
  const auto n = [](std::size_t v) { return static_cast<double>(v); };
  const std::vector<Target> targets = {
      {"square images", n(summary.splits[0].image_ids.size()), 2988},
      {"wide images", n(summary.splits[1].image_ids.size()), 3158},
      {"wide labels", n(summary.splits[1].labels.size()), 8522},
      {"tall images", n(summary.splits[2].image_ids.size()), 4061},
      {"tall labels", n(summary.splits[2].labels.size()), 21578},
      {"all images", n(summary.total_images), 5000},
      {"all labels", n(summary.total_labels), 36335}};
  std::ostringstream detail;
  bool ok = true;
  for (const auto& t : targets) {
    const double rel = std::abs(t.got - t.want) / t.want;
    ok = ok && rel <= 0.03;
    detail << t.what << '=' << t.got << " (" << Fmt("%+.1f%%", 100 * (t.got - t.want) / t.want)
           << ") ";
  }
  return ok ? Pass(detail.str()) : Fail(detail.str());
}

std::string WithoutTimingLines(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::string out;
  while (std::getline(in, line)) {
    if (line.rfind("time.", 0) != 0) out += line + '\n';
  }
  return out;
}

Verdict Determinism(const fs::path& scratch) {
  SynthOptions s;
  s.seed = 0;
  s.image_count = 3;
  s.input_size = 128;
  s.out = scratch / "det_fixture";
  Synthesize(s);
  std::string outputs[2];
  for (int run = 0; run < 2; ++run) {
    const fs::path out = scratch / ("run" + std::to_string(run));
    DetectOptions d;
    d.fixtures = s.out;
    d.input_size = s.input_size;
    d.out = out;
    RunDetect(d);
    EvalOptions e;
    e.detections = out / "detections.txt";
    e.labels = s.out / fixture::kLabelsDir;
    e.sizes = s.out / fixture::kSizeManifest;
    e.timing = out / "timing.txt";
    e.out = out;
    RunEval(e);
    outputs[run] = ReadTextFile(out / "detections.txt") + "\n--\n" +
                   WithoutTimingLines(ReadTextFile(out / "metrics.txt")) + "\n--\n" +
                   ReadTextFile(out / "pr_curve.csv");
  }
  if (outputs[0] != outputs[1]) return Fail("outputs differ between runs");
  return Pass(std::to_string(outputs[0].size()) + " bytes compared");
}

int RunAll() {
  const fs::path scratch = fs::temp_directory_path() / "asymdet_acceptance";
  fs::remove_all(scratch);
  fs::create_directories(scratch);

  const std::vector<Criterion> criteria = {
      {"shape-suite", 1, ShapeSuite},
      {"pooling-oracle", 30, PoolingOracle},
      {"decode-round-trip", 10, DecodeRoundTrip},
      {"nms-oracle", 30, NmsOracle},
      {"ap-map-oracle", 30, ApOracle},
      {"precision-recall-cases", 0, PrecisionRecallCases},
      {"parameter-count", 0, ParameterCount},
      {"stratification-partition", 5, [&] { return StratificationPartition(scratch); }},
      {"coco-split-counts", 60, [&] { return CocoCounts(scratch); }},
      {"determinism", 0, [&] { return Determinism(scratch); }},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.check();
    } catch (const Error& e) {
      v = Fail(std::string("error[") + std::string(ErrorKindName(e.kind())) + "]: " + e.what());
    } catch (const std::exception& e) {
      v = Fail(e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (v.outcome == Outcome::kPass && c.limit_s > 0 && secs > c.limit_s) {
      v = Fail("took " + Fmt("%.2f", secs) + " s, limit " + Fmt("%.0f", c.limit_s) + " s");
    }
    const char* tag = v.outcome == Outcome::kPass ? "PASS" : v.outcome == Outcome::kFail ? "FAIL"
                                                                                         : "SKIP";
    std::printf("%s %s (%.2f s)%s%s\n", tag, c.name.c_str(), secs, v.detail.empty() ? "" : ": ",
                v.detail.c_str());
    std::fflush(stdout);
    failures += v.outcome == Outcome::kFail;
  }
  fs::remove_all(scratch);
  return failures == 0 ? 0 : 1;
}

}  // namespace
}  // namespace asymdet

int main() { return asymdet::RunAll(); }
