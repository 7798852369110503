// Copyright 2026 The hmmseg Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hmmseg/corpus.hpp"
#include "hmmseg/error.hpp"

namespace hmmseg {

/// Frame tallies of one class, pooled over all videos.
struct ClassTally {
  LabelId label = 0;
  long long gt_frames = 0;
  long long hyp_frames = 0;
  long long overlap = 0;  // frames labeled with the class in both

  long long union_frames() const { return gt_frames + hyp_frames - overlap; }
};

struct EvalReport {
  double mof = 0.0;
  double moc = 0.0;
  double jacc_iou = 0.0;
  double jacc_iod = 0.0;
  std::vector<ClassTally> per_class;  // sorted by label id
  std::optional<double> activity_accuracy;
  int evaluated = 0;
  int skipped = 0;
};

namespace detail {

// Class averages are accumulated in extended precision so that small
// rational results round to the nearest double.
struct FrameTallies {
  long long frames = 0;
  long long correct = 0;
  std::map<LabelId, ClassTally> classes;
};

inline FrameTallies tally(std::span<const FrameLabeling> gt, std::span<const FrameLabeling> hyp) {
  require(gt.size() == hyp.size(), ErrorCode::invalid_argument, "ground truth and hypothesis video counts differ");
  FrameTallies out;
  for (std::size_t v = 0; v < gt.size(); ++v) {
    require(gt[v].video_id == hyp[v].video_id, ErrorCode::invalid_argument,
            "video '" + gt[v].video_id + "' is paired with hypothesis '" + hyp[v].video_id + "'");
    require(gt[v].length() == hyp[v].length(), ErrorCode::invalid_argument,
            "video '" + gt[v].video_id + "' has " + std::to_string(gt[v].length()) +
                " ground-truth frames but " + std::to_string(hyp[v].length()) + " hypothesis frames");
    for (int t = 0; t < gt[v].length(); ++t) {
      const LabelId g = gt[v].labels[static_cast<std::size_t>(t)];
      const LabelId h = hyp[v].labels[static_cast<std::size_t>(t)];
      auto& gc = out.classes[g];
      gc.label = g;
      gc.gt_frames += 1;
      auto& hc = out.classes[h];
      hc.label = h;
      hc.hyp_frames += 1;
      if (g == h) {
        hc.overlap += 1;
        out.correct += 1;
      }
      out.frames += 1;
    }
  }
  require(out.frames > 0, ErrorCode::invalid_argument, "no frames to evaluate");
  return out;
}

}  // namespace detail

/// Fraction of correctly labeled frames, pooled over all videos.
inline double mof(std::span<const FrameLabeling> gt, std::span<const FrameLabeling> hyp) {
  const auto t = detail::tally(gt, hyp);
  return static_cast<double>(t.correct) / static_cast<double>(t.frames);
}

/// Mean per-class frame accuracy over classes present in the ground truth.
inline double moc(std::span<const FrameLabeling> gt, std::span<const FrameLabeling> hyp) {
  const auto t = detail::tally(gt, hyp);
  long double sum = 0.0L;
  int classes = 0;
  for (const auto& [label, c] : t.classes) {
    if (c.gt_frames == 0) continue;
    sum += static_cast<long double>(c.overlap) / static_cast<long double>(c.gt_frames);
    ++classes;
  }
  return static_cast<double>(sum / classes);
}

/// Mean |G ∩ D| / |G ∪ D| over classes occurring in either labeling.
inline double jaccard_iou(std::span<const FrameLabeling> gt, std::span<const FrameLabeling> hyp) {
  const auto t = detail::tally(gt, hyp);
  long double sum = 0.0L;
  int classes = 0;
  for (const auto& [label, c] : t.classes) {
    if (c.union_frames() == 0) continue;
    sum += static_cast<long double>(c.overlap) / static_cast<long double>(c.union_frames());
    ++classes;
  }
  return static_cast<double>(sum / classes);
}

/// Mean |G ∩ D| / |D| over classes that were hypothesized.
inline double jaccard_iod(std::span<const FrameLabeling> gt, std::span<const FrameLabeling> hyp) {
  const auto t = detail::tally(gt, hyp);
  long double sum = 0.0L;
  int classes = 0;
  for (const auto& [label, c] : t.classes) {
    if (c.hyp_frames == 0) continue;
    sum += static_cast<long double>(c.overlap) / static_cast<long double>(c.hyp_frames);
    ++classes;
  }
  return static_cast<double>(sum / classes);
}

/// Fraction of videos whose hypothesized activity equals the ground truth.
/// A missing hypothesis tag counts as wrong.
inline double activity_accuracy(std::span<const std::optional<std::string>> gt,
                                std::span<const std::optional<std::string>> hyp) {
  require(gt.size() == hyp.size(), ErrorCode::invalid_argument, "activity tag counts differ");
  require(!gt.empty(), ErrorCode::invalid_argument, "no activity tags to evaluate");
  std::size_t correct = 0;
  for (std::size_t v = 0; v < gt.size(); ++v) {
    if (gt[v] && hyp[v] && *gt[v] == *hyp[v]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(gt.size());
}

inline EvalReport evaluate(std::span<const FrameLabeling> gt, std::span<const FrameLabeling> hyp) {
  EvalReport report;
  report.mof = mof(gt, hyp);
  report.moc = moc(gt, hyp);
  report.jacc_iou = jaccard_iou(gt, hyp);
  report.jacc_iod = jaccard_iod(gt, hyp);
  for (const auto& [label, c] : detail::tally(gt, hyp).classes) report.per_class.push_back(c);
  report.evaluated = static_cast<int>(gt.size());
  return report;
}

}  // namespace hmmseg
