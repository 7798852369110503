// Copyright 2026 The hmmseg Authors
// SPDX-License-Identifier: Apache-2.0

#include <optional>
#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "hmmseg/hmmseg.hpp"

namespace hmmseg {
namespace {

constexpr LabelId A = 0;
constexpr LabelId B = 1;
constexpr LabelId C = 2;

std::vector<FrameLabeling> one(std::vector<LabelId> labels, std::string id = "v") {
  return {FrameLabeling{std::move(id), std::move(labels)}};
}

TEST(Metrics, WorkedExample) {
  const auto gt = one({A, A, B, B});
  const auto hyp = one({A, B, B, B});
  EXPECT_EQ(mof(gt, hyp), 0.75);
  EXPECT_EQ(moc(gt, hyp), 0.75);
  EXPECT_EQ(jaccard_iou(gt, hyp), 7.0 / 12.0);
  EXPECT_EQ(jaccard_iod(gt, hyp), 5.0 / 6.0);
}

TEST(Metrics, IdentityIsPerfect) {
  const auto gt = one({A, C, C, B, A});
  const auto report = evaluate(gt, gt);
  EXPECT_EQ(report.mof, 1.0);
  EXPECT_EQ(report.moc, 1.0);
  EXPECT_EQ(report.jacc_iou, 1.0);
  EXPECT_EQ(report.jacc_iod, 1.0);
  EXPECT_EQ(report.evaluated, 1);
}

TEST(Mof, PoolsFramesAcrossVideos) {
  const std::vector<FrameLabeling> gt{{"a", {A, A, B, B}}, {"b", {A, B}}};
  const std::vector<FrameLabeling> hyp{{"a", {A, B, B, B}}, {"b", {B, B}}};
  EXPECT_DOUBLE_EQ(mof(gt, hyp), 4.0 / 6.0);
}

TEST(Moc, AveragesOutClassImbalance) {
  const auto gt = one({A, A, A, B});
  const auto hyp = one({A, A, A, A});
  EXPECT_EQ(moc(gt, hyp), 0.5);
  EXPECT_EQ(mof(gt, hyp), 0.75);
}

TEST(Moc, IgnoresClassesOnlyHypothesized) {
  EXPECT_EQ(moc(one({A, A}), one({A, C})), 0.5);
}

TEST(JaccardIou, DisjointIsZero) { EXPECT_EQ(jaccard_iou(one({A, A, B, B}), one({B, B, A, A})), 0.0); }

TEST(JaccardIod, HypothesizedButAbsentClassScoresZero) {
  // A: 1/1, C: 0/1.
  EXPECT_EQ(jaccard_iod(one({A, A}), one({A, C})), 0.5);
}

TEST(Metrics, LengthMismatch) {
  try {
    mof(one({A, A}), one({A}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::invalid_argument);
  }
  EXPECT_THROW(moc(one({A}, "x"), one({A}, "y")), Error);
}

TEST(Metrics, IodAtLeastIouOnRandomLabelings) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<FrameLabeling> gt, hyp;
    const int videos = 1 + static_cast<int>(rng() % 3);
    for (int v = 0; v < videos; ++v) {
      const int frames = 1 + static_cast<int>(rng() % 30);
      FrameLabeling g{std::to_string(v), {}}, h{std::to_string(v), {}};
      for (int t = 0; t < frames; ++t) {
        g.labels.push_back(static_cast<LabelId>(rng() % 4));
        h.labels.push_back(static_cast<LabelId>(rng() % 4));
      }
      gt.push_back(g);
      hyp.push_back(h);
    }
    const auto r = evaluate(gt, hyp);
    EXPECT_GE(r.jacc_iod, r.jacc_iou);
    for (double m : {r.mof, r.moc, r.jacc_iou, r.jacc_iod}) {
      EXPECT_GE(m, 0.0);
      EXPECT_LE(m, 1.0);
    }
  }
}

TEST(Evaluate, PerClassTallies) {
  const auto r = evaluate(one({A, A, B, B}), one({A, B, B, C}));
  ASSERT_EQ(r.per_class.size(), 3u);
  EXPECT_EQ(r.per_class[0].gt_frames, 2);
  EXPECT_EQ(r.per_class[0].overlap, 1);
  EXPECT_EQ(r.per_class[1].hyp_frames, 2);
  EXPECT_EQ(r.per_class[2].gt_frames, 0);
  EXPECT_EQ(r.per_class[2].union_frames(), 1);
}

TEST(ActivityAccuracy, CountsMatches) {
  using Tag = std::optional<std::string>;
  const std::vector<Tag> gt{"a", "b", "c", "d"};
  EXPECT_EQ(activity_accuracy(gt, std::vector<Tag>{"a", "b", "x", "y"}), 0.5);
  EXPECT_EQ(activity_accuracy(gt, gt), 1.0);
  EXPECT_EQ(activity_accuracy(gt, std::vector<Tag>{"a", std::nullopt, "c", "d"}), 0.75);
  EXPECT_THROW(activity_accuracy(gt, std::vector<Tag>{"a"}), Error);
}

}  // namespace
}  // namespace hmmseg
