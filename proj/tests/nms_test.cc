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

#include "asymdet/error.h"
#include "asymdet/random.h"
#include "gtest/gtest.h"
#include "oracles.h"

namespace asymdet {
namespace {

BBox Box(double cx, double cy, double w, double h, double conf, int cls = 0,
         std::optional<ShapeClass> branch = std::nullopt) {
  BBox b;
  b.cx = cx;
  b.cy = cy;
  b.w = w;
  b.h = h;
  b.confidence = conf;
  b.class_id = cls;
  b.branch = branch;
  return b;
}

bool IsSubset(const std::vector<BBox>& sub, const std::vector<BBox>& super) {
  return std::all_of(sub.begin(), sub.end(), [&](const BBox& b) {
    return std::find(super.begin(), super.end(), b) != super.end();
  });
}

TEST(NmsTest, EmptyAndSingle) {
  EXPECT_TRUE(Nms({}, NmsParams{}).empty());
  const std::vector<BBox> one = {Box(5, 5, 4, 4, 0.3)};
  EXPECT_EQ(Nms(one, NmsParams{}), one);
}

TEST(NmsTest, IdenticalBoxesKeepHigherConfidence) {
  const std::vector<BBox> boxes = {Box(5, 5, 4, 4, 0.8), Box(5, 5, 4, 4, 0.9)};
  NmsParams p;
  p.iou_threshold = 0.5;
  const auto kept = Nms(boxes, p);
  ASSERT_EQ(kept.size(), 1u);
  EXPECT_EQ(kept[0].confidence, 0.9);
}

TEST(NmsTest, PerClassAndAgnostic) {
  const std::vector<BBox> boxes = {Box(5, 5, 4, 4, 0.9, 1), Box(5, 5, 4, 4, 0.8, 2)};
  NmsParams p;
  EXPECT_EQ(Nms(boxes, p).size(), 2u);
  p.per_class = false;
  EXPECT_EQ(Nms(boxes, p).size(), 1u);
}

TEST(NmsTest, TiesBreakByClassThenInputOrder) {
  NmsParams p;
  p.per_class = false;
  const std::vector<BBox> boxes = {Box(5, 5, 4, 4, 0.7, 3), Box(5, 5, 4, 4, 0.7, 1),
                                   Box(5, 5, 4, 4, 0.7, 1)};
  const auto kept = Nms(boxes, p);
  ASSERT_EQ(kept.size(), 1u);
  EXPECT_EQ(kept[0].class_id, 1);
}

TEST(NmsTest, TruncatesToMaxDetections) {
  std::vector<BBox> boxes;
  for (int i = 0; i < 10; ++i) boxes.push_back(Box(20.0 * i, 0, 5, 5, 0.1 * i / 2));
  NmsParams p;
  p.max_detections = 4;
  const auto kept = Nms(boxes, p);
  ASSERT_EQ(kept.size(), 4u);
  EXPECT_EQ(kept[0].confidence, boxes[9].confidence);
}

TEST(NmsTest, InvalidThreshold) {
  NmsParams p;
  p.iou_threshold = 1.0;
  EXPECT_THROW(Nms({}, p), Error);
  p.iou_threshold = 0.0;
  EXPECT_THROW(Nms({}, p), Error);
}

TEST(NmsTest, MatchesBruteForceOracle) {
  Rng rng(2024);
  for (int seed = 0; seed < 1000; ++seed) {
    const auto boxes = oracle::RandomNmsSet(rng, 20);
    NmsParams p;
    p.iou_threshold = rng.Uniform(0.1, 0.9);
    p.per_class = rng.Bernoulli(0.5);
    p.max_detections = static_cast<std::size_t>(rng.Int(1, 25));
    const auto kept = Nms(boxes, p);
    ASSERT_EQ(kept, oracle::BruteNms(boxes, p)) << "case " << seed;
    EXPECT_TRUE(oracle::ConflictFree(kept, p));
    EXPECT_TRUE(IsSubset(kept, boxes));
    EXPECT_EQ(Nms(kept, p), kept);
  }
}

TEST(NmsTest, SurvivorCountIsNotMonotoneInThreshold) {
  // B overlaps A at IoU 0.5 and overlaps C and D at about 0.55; A barely
  // touches C and D. Raising the threshold past 0.5 keeps B, which then
  // suppresses both C and D.
  const double s = 10.0 / 3.0;
  const std::vector<BBox> boxes = {Box(5, 5, 10, 10, 0.9), Box(5 + s, 5, 10, 10, 0.8),
                                   Box(5 + s + 2.903, 5, 10, 10, 0.7),
                                   Box(5 + s, 5 + 2.903, 10, 10, 0.6)};
  NmsParams p;
  p.per_class = false;
  p.iou_threshold = 0.49;
  EXPECT_EQ(Nms(boxes, p).size(), 3u);
  EXPECT_EQ(oracle::BruteNms(boxes, p).size(), 3u);
  p.iou_threshold = 0.53;
  EXPECT_EQ(Nms(boxes, p).size(), 2u);
  EXPECT_EQ(oracle::BruteNms(boxes, p).size(), 2u);
}

TEST(GroupedNmsTest, SingleGroupEqualsPlainNms) {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    auto boxes = oracle::RandomNmsSet(rng, 20);
    for (auto& b : boxes) b.branch = ShapeClass::kWide;
    const NmsParams p;
    EXPECT_EQ(GroupedNms({"img", boxes}, p), Nms(boxes, p));
  }
}

TEST(GroupedNmsTest, DisjointBoxesFromEachGroupSurvive) {
  const DetectionSet set{"img",
                         {Box(10, 10, 5, 5, 0.5, 0, ShapeClass::kSquare),
                          Box(50, 10, 5, 5, 0.6, 0, ShapeClass::kWide),
                          Box(90, 10, 5, 5, 0.7, 0, ShapeClass::kTall)}};
  EXPECT_EQ(GroupedNms(set, NmsParams{}).size(), 3u);
}

TEST(GroupedNmsTest, CrossGroupOverlapIsResolvedByFinalPass) {
  const DetectionSet set{"img",
                         {Box(10, 10, 8, 8, 0.5, 0, ShapeClass::kSquare),
                          Box(10, 10, 8, 8, 0.9, 0, ShapeClass::kWide)}};
  const auto kept = GroupedNms(set, NmsParams{});
  ASSERT_EQ(kept.size(), 1u);
  EXPECT_EQ(kept[0].branch, ShapeClass::kWide);
}

TEST(GroupedNmsTest, UntaggedBoxIsRejected) {
  EXPECT_THROW(GroupedNms({"img", {Box(1, 1, 1, 1, 0.5)}}, NmsParams{}), Error);
}

TEST(GroupedNmsTest, MatchesOracleComposition) {
  Rng rng(99);
  for (int seed = 0; seed < 1000; ++seed) {
    const auto boxes = oracle::RandomNmsSet(rng, 30);
    NmsParams p;
    p.iou_threshold = rng.Uniform(0.1, 0.9);
    p.per_class = rng.Bernoulli(0.5);
    p.max_detections = static_cast<std::size_t>(rng.Int(1, 35));
    const auto kept = GroupedNms({"img", boxes}, p);
    ASSERT_EQ(kept, oracle::BruteGroupedNms(boxes, p)) << "case " << seed;
    EXPECT_TRUE(oracle::ConflictFree(kept, p));
    EXPECT_TRUE(IsSubset(kept, boxes));
  }
}

}  // namespace
}  // namespace asymdet
