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

// Command-line front end: synth, detect, eval, stratify.

#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "asymdet/error.h"
#include "asymdet/pipeline.h"

namespace {

using asymdet::HeadVariant;

HeadVariant ToVariant(const std::string& name) {
  return name == "original" ? HeadVariant::kOriginal : HeadVariant::kAsym;
}

void PrintReport(const asymdet::EvalReport& r) {
  std::printf("%-8s %-8s %-10s %-12s\n", "P", "R", "mAP@0.5", "mAP@.5:.95");
  std::printf("%-8.3f %-8.3f %-10.3f %-12.3f\n", r.precision, r.recall, r.map50, r.map5095);
  if (r.timing) {
    std::printf("pre-process %.1fms  inference %.1fms  NMS %.1fms per image\n",
                r.timing->pre_process_ms, r.timing->inference_ms, r.timing->nms_ms);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Asymmetric receptive-field detection head: fixtures, detection, "
               "evaluation and aspect-ratio splits"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  int imgsz = asymdet::kDefaultInputSize;
  int workers = 0;
  std::string out;

  // synth
  asymdet::SynthOptions synth;
  auto* synth_cmd = app.add_subcommand("synth", "Write a seeded synthetic fixture directory");
  synth_cmd->add_option("--seed", seed, "RNG seed")->capture_default_str();
  synth_cmd->add_option("--images", synth.image_count, "Number of images")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  synth_cmd->add_option("--imgsz", imgsz, "Network input size")->capture_default_str();
  synth_cmd->add_flag("--zero-weights", synth.zero_weights, "Write all-zero head weights");
  synth_cmd->add_option("--out", out, "Output fixture directory")->required();

  // detect
  asymdet::DetectOptions detect;
  std::string fixtures;
  std::string variant = "asym";
  bool agnostic = false;
  auto* detect_cmd = app.add_subcommand("detect", "Run head, decode and NMS over fixtures");
  detect_cmd->add_option("--fixtures", fixtures, "Fixture directory")->required();
  detect_cmd->add_option("--variant", variant, "Head variant")
      ->check(CLI::IsMember({"original", "asym"}))
      ->capture_default_str();
  detect_cmd->add_option("--conf", detect.conf_threshold, "Confidence threshold")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  detect_cmd->add_option("--iou-nms", detect.nms.iou_threshold, "NMS IoU threshold")
      ->capture_default_str();
  detect_cmd->add_option("--max-det", detect.nms.max_detections, "Detections kept per image")
      ->capture_default_str();
  detect_cmd->add_flag("--agnostic", agnostic, "Suppress across classes");
  detect_cmd->add_option("--imgsz", imgsz, "Network input size")->capture_default_str();
  detect_cmd->add_option("--workers", workers, "Worker threads (0: all cores)")
      ->capture_default_str();
  detect_cmd->add_option("--out", out, "Output directory")->required();

  // eval
  asymdet::EvalOptions eval;
  std::string detections, labels, sizes, timing;
  auto* eval_cmd = app.add_subcommand("eval", "Score detections against ground truth");
  eval_cmd->add_option("--detections", detections, "detections.txt from detect")->required();
  eval_cmd->add_option("--labels", labels, "Directory of <image_id>.txt label files")
      ->required();
  eval_cmd->add_option("--sizes", sizes, "Image size manifest CSV")->required();
  eval_cmd->add_option("--timing", timing, "timing.txt from detect");
  eval_cmd->add_option("--iou-eval", eval.iou_thresholds,
                       "Comma-separated IoU thresholds for mAP@.5:.95")
      ->delimiter(',');
  eval_cmd->add_option("--out", out, "Output directory")->required();

  // stratify
  asymdet::StratifyOptions strat;
  auto* strat_cmd = app.add_subcommand("stratify", "Split labels by aspect ratio");
  strat_cmd->add_option("--labels", labels, "Directory of <image_id>.txt label files")
      ->required();
  strat_cmd->add_option("--sizes", sizes, "Image size manifest CSV");
  strat_cmd->add_option("--out", out, "Output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth_cmd->parsed()) {
      synth.seed = seed;
      synth.input_size = imgsz;
      synth.out = out;
      asymdet::Synthesize(synth);
      std::printf("wrote %d synthetic images to %s\n", synth.image_count, out.c_str());
    } else if (detect_cmd->parsed()) {
      detect.fixtures = fixtures;
      detect.variant = ToVariant(variant);
      detect.input_size = imgsz;
      detect.nms.per_class = !agnostic;
      detect.workers = workers;
      detect.out = out;
      const auto result = asymdet::RunDetect(detect);
      std::printf("%zu detections over %zu images\n", result.detections.size(),
                  result.image_ids.size());
      if (!result.timing.empty()) {
        const auto t = asymdet::SummarizeTiming(result.timing);
        std::printf("pre-process %.1fms  inference %.1fms  NMS %.1fms per image\n",
                    t.pre_process_ms, t.inference_ms, t.nms_ms);
      }
    } else if (eval_cmd->parsed()) {
      eval.detections = detections;
      eval.labels = labels;
      eval.sizes = sizes;
      if (!timing.empty()) eval.timing = timing;
      eval.out = out;
      PrintReport(asymdet::RunEval(eval));
    } else if (strat_cmd->parsed()) {
      strat.labels = labels;
      if (sizes.empty()) {
        throw asymdet::Error(asymdet::ErrorKind::kConfig,
                             "missing size manifest (--sizes is required)");
      }
      strat.sizes = sizes;
      strat.out = out;
      std::fputs(asymdet::FormatStratifySummary(asymdet::RunStratify(strat)).c_str(), stdout);
    }
  } catch (const asymdet::Error& e) {
    std::cerr << "error[" << asymdet::ErrorKindName(e.kind()) << "]: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error[internal]: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
