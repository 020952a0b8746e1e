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

#include "asymdet/eval.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <tuple>
#include <unordered_map>

#include "asymdet/error.h"

namespace asymdet {
namespace {

double SafeRatio(std::int64_t num, std::int64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

// A prediction after matching, with the keys that fix its global rank.
struct Scored {
  double confidence;
  std::size_t image;
  std::size_t rank;
  int class_id;
  bool tp;
};

bool RankBefore(const Scored& a, const Scored& b) {
  return std::tie(b.confidence, a.image, a.rank) <
         std::tie(a.confidence, b.image, b.rank);
}

std::vector<bool> Flags(const std::vector<Scored>& entries) {
  std::vector<bool> flags;
  flags.reserve(entries.size());
  for (const auto& e : entries) flags.push_back(e.tp);
  return flags;
}

std::string Fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

struct PreparedImage {
  std::vector<BBox> preds;  // confidence-sorted
  const std::vector<BBox>* gts = nullptr;
};

}  // namespace

PrecisionRecall ComputePrecisionRecall(const ConfusionCounts& c) {
  return {SafeRatio(c.tp, c.tp + c.fp), SafeRatio(c.tp, c.tp + c.fn)};
}

MatchResult MatchDetections(std::span<const BBox> preds,
                            std::span<const BBox> gts, double iou_threshold) {
  MatchResult result;
  result.is_tp.assign(preds.size(), false);
  result.matched_gt.assign(preds.size(), -1);
  std::vector<bool> taken(gts.size(), false);
  for (std::size_t p = 0; p < preds.size(); ++p) {
    int best = -1;
    double best_iou = iou_threshold;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (taken[g] || gts[g].class_id != preds[p].class_id) continue;
      const double iou = Iou(preds[p], gts[g]);
      if (iou >= best_iou && (best < 0 || iou > best_iou)) {
        best = static_cast<int>(g);
        best_iou = iou;
      }
    }
    if (best >= 0) {
      taken[static_cast<std::size_t>(best)] = true;
      result.is_tp[p] = true;
      result.matched_gt[p] = best;
    }
  }
  result.unmatched_gt = std::count(taken.begin(), taken.end(), false);
  return result;
}

double RecallSample(int i) { return static_cast<double>(i) / 100.0; }

PrCurve InterpolatedPrecision(const std::vector<bool>& flags, std::int64_t total_gt) {
  PrCurve curve{};
  if (total_gt <= 0 || flags.empty()) return curve;
  const std::size_t n = flags.size();
  std::vector<double> recall(n);
  std::vector<double> precision(n);
  std::int64_t tp = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (flags[k]) ++tp;
    recall[k] = SafeRatio(tp, total_gt);
    precision[k] = SafeRatio(tp, static_cast<std::int64_t>(k + 1));
  }
  for (std::size_t k = n - 1; k-- > 0;) {
    precision[k] = std::max(precision[k], precision[k + 1]);
  }
  for (int i = 0; i < kRecallSamples; ++i) {
    const auto it = std::lower_bound(recall.begin(), recall.end(), RecallSample(i));
    curve[static_cast<std::size_t>(i)] =
        it == recall.end() ? 0.0 : precision[static_cast<std::size_t>(it - recall.begin())];
  }
  return curve;
}

std::optional<double> AveragePrecision(const std::vector<bool>& flags,
                                       std::int64_t total_gt) {
  if (total_gt <= 0) return std::nullopt;
  const PrCurve curve = InterpolatedPrecision(flags, total_gt);
  return std::accumulate(curve.begin(), curve.end(), 0.0) / kRecallSamples;
}

std::vector<double> CocoIouThresholds() {
  std::vector<double> t;
  for (int i = 0; i < 10; ++i) t.push_back(static_cast<double>(50 + 5 * i) / 100.0);
  return t;
}

EvalReport MapAt(std::span<const ImageBoxes> preds, std::span<const ImageBoxes> gts,
                 std::span<const double> iou_thresholds) {
  if (iou_thresholds.empty()) {
    throw Error(ErrorKind::kConfig, "at least one evaluation IoU threshold is required");
  }
  for (double t : iou_thresholds) {
    if (!(t > 0.0 && t <= 1.0)) {
      throw Error(ErrorKind::kConfig,
                  "evaluation IoU threshold out of range: " + std::to_string(t));
    }
  }

  // Images are ranked by id so that input order never changes the result.
  std::vector<const ImageBoxes*> images;
  for (const auto& g : gts) images.push_back(&g);
  std::sort(images.begin(), images.end(),
            [](const ImageBoxes* a, const ImageBoxes* b) { return a->image_id < b->image_id; });
  std::unordered_map<std::string, std::size_t> index;
  std::map<int, std::int64_t> gt_per_class;
  EvalReport report;
  for (std::size_t i = 0; i < images.size(); ++i) {
    if (!index.emplace(images[i]->image_id, i).second) {
      throw Error(ErrorKind::kValidation,
                  "duplicate ground-truth image id: " + images[i]->image_id);
    }
    for (const auto& b : images[i]->boxes) ++gt_per_class[b.class_id];
    report.num_gt += images[i]->boxes.size();
  }
  if (report.num_gt == 0) {
    throw Error(ErrorKind::kEmptyDataset, "ground truth contains no boxes");
  }
  report.num_images = images.size();

  std::vector<PreparedImage> prepared(images.size());
  for (std::size_t i = 0; i < images.size(); ++i) prepared[i].gts = &images[i]->boxes;
  for (const auto& p : preds) {
    const auto it = index.find(p.image_id);
    if (it == index.end()) {
      throw Error(ErrorKind::kValidation,
                  "predictions for unknown image id: " + p.image_id);
    }
    auto& dst = prepared[it->second].preds;
    dst.insert(dst.end(), p.boxes.begin(), p.boxes.end());
    report.num_predictions += p.boxes.size();
  }
  for (auto& img : prepared) {
    std::stable_sort(img.preds.begin(), img.preds.end(),
                     [](const BBox& a, const BBox& b) { return a.confidence > b.confidence; });
  }

  const auto score_at = [&](double threshold) {
    std::vector<Scored> all;
    for (std::size_t i = 0; i < prepared.size(); ++i) {
      const auto m = MatchDetections(prepared[i].preds, *prepared[i].gts, threshold);
      for (std::size_t r = 0; r < prepared[i].preds.size(); ++r) {
        const BBox& b = prepared[i].preds[r];
        all.push_back({b.confidence, i, r, b.class_id, m.is_tp[r]});
      }
    }
    std::sort(all.begin(), all.end(), RankBefore);
    return all;
  };
  const auto per_class = [](const std::vector<Scored>& all) {
    std::map<int, std::vector<Scored>> split;
    for (const auto& s : all) split[s.class_id].push_back(s);
    return split;
  };

  for (const auto& [cls, n] : gt_per_class) report.classes.push_back(cls);
  const auto n_classes = static_cast<double>(report.classes.size());

  // IoU 0.5: per-class AP, PR curves and the operating point.
  const std::vector<Scored> at50 = score_at(0.5);
  {
    auto split = per_class(at50);
    double sum = 0;
    for (int cls : report.classes) {
      const auto flags = Flags(split[cls]);
      const double ap = *AveragePrecision(flags, gt_per_class[cls]);
      report.ap50[cls] = ap;
      report.pr_curve[cls] = InterpolatedPrecision(flags, gt_per_class[cls]);
      sum += ap;
    }
    report.map50 = sum / n_classes;

    const auto total_gt = static_cast<std::int64_t>(report.num_gt);
    report.counts = {0, 0, total_gt};
    double best_f1 = -1;
    std::int64_t tp = 0;
    for (std::size_t k = 0; k < at50.size(); ++k) {
      if (at50[k].tp) ++tp;
      // Only cut between distinct confidences.
      if (k + 1 < at50.size() && at50[k + 1].confidence == at50[k].confidence) continue;
      const auto fp = static_cast<std::int64_t>(k + 1) - tp;
      const ConfusionCounts c{tp, fp, total_gt - tp};
      const auto pr = ComputePrecisionRecall(c);
      const double denom = pr.precision + pr.recall;
      const double f1 = denom > 0 ? 2 * pr.precision * pr.recall / denom : 0.0;
      if (f1 > best_f1) {
        best_f1 = f1;
        report.counts = c;
        report.precision = pr.precision;
        report.recall = pr.recall;
        report.operating_confidence = at50[k].confidence;
      }
    }
  }

  report.iou_thresholds.assign(iou_thresholds.begin(), iou_thresholds.end());
  for (int cls : report.classes) report.ap_mean[cls] = 0;
  for (double t : iou_thresholds) {
    auto split = per_class(t == 0.5 ? at50 : score_at(t));
    double sum = 0;
    for (int cls : report.classes) {
      const double ap = *AveragePrecision(Flags(split[cls]), gt_per_class[cls]);
      report.ap_mean[cls] += ap;
      sum += ap;
    }
    report.map_per_threshold.push_back(sum / n_classes);
  }
  for (int cls : report.classes) {
    report.ap_mean[cls] /= static_cast<double>(iou_thresholds.size());
  }
  double sum = 0;
  for (int cls : report.classes) sum += report.ap_mean[cls];
  report.map5095 = sum / n_classes;
  return report;
}

TimingReport SummarizeTiming(std::span<const StageTiming> per_image) {
  if (per_image.empty()) {
    throw Error(ErrorKind::kValidation, "timing summary needs at least one image");
  }
  TimingReport r;
  for (const auto& t : per_image) {
    r.pre_process_ms += t.pre_process_ms;
    r.inference_ms += t.inference_ms;
    r.nms_ms += t.nms_ms;
  }
  const auto n = static_cast<double>(per_image.size());
  const auto tenth = [n](double total) { return std::round(total / n * 10.0) / 10.0; };
  return {tenth(r.pre_process_ms), tenth(r.inference_ms), tenth(r.nms_ms)};
}

std::string FormatReport(const EvalReport& r) {
  std::ostringstream out;
  out << "P=" << Fixed(r.precision, 6) << '\n';
  out << "R=" << Fixed(r.recall, 6) << '\n';
  out << "mAP@0.5=" << Fixed(r.map50, 6) << '\n';
  out << "mAP@.5:.95=" << Fixed(r.map5095, 6) << '\n';
  if (r.timing) {
    out << "time.pre-process_ms=" << Fixed(r.timing->pre_process_ms, 1) << '\n';
    out << "time.inference_ms=" << Fixed(r.timing->inference_ms, 1) << '\n';
    out << "time.nms_ms=" << Fixed(r.timing->nms_ms, 1) << '\n';
  }
  out << "operating_confidence=" << Fixed(r.operating_confidence, 6) << '\n';
  out << "tp=" << r.counts.tp << '\n';
  out << "fp=" << r.counts.fp << '\n';
  out << "fn=" << r.counts.fn << '\n';
  out << "images=" << r.num_images << '\n';
  out << "labels=" << r.num_gt << '\n';
  out << "predictions=" << r.num_predictions << '\n';
  out << "classes=" << r.classes.size() << '\n';
  for (std::size_t i = 0; i < r.iou_thresholds.size(); ++i) {
    out << "mAP@" << Fixed(r.iou_thresholds[i], 2) << '='
        << Fixed(r.map_per_threshold[i], 6) << '\n';
  }
  for (int cls : r.classes) {
    out << "AP50.class" << cls << '=' << Fixed(r.ap50.at(cls), 6) << '\n';
  }
  for (int cls : r.classes) {
    out << "AP.class" << cls << '=' << Fixed(r.ap_mean.at(cls), 6) << '\n';
  }
  return out.str();
}

std::string FormatPrCurveCsv(const EvalReport& r) {
  std::ostringstream out;
  out << "class_id,recall,precision\n";
  for (const auto& [cls, curve] : r.pr_curve) {
    for (int i = 0; i < kRecallSamples; ++i) {
      out << cls << ',' << Fixed(RecallSample(i), 2) << ','
          << Fixed(curve[static_cast<std::size_t>(i)], 6) << '\n';
    }
  }
  return out.str();
}

}  // namespace asymdet
