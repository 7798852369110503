// Copyright 2026 The hmmseg Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hmmseg/error.hpp"
#include "hmmseg/numeric.hpp"

namespace hmmseg {

using LabelId = int;

/// Frame features of one video: T rows of l-dimensional vectors.
struct FeatureSequence {
  std::string video_id;
  FrameMatrix frames;

  int length() const { return static_cast<int>(frames.rows()); }
  int dim() const { return static_cast<int>(frames.cols()); }

  void validate() const {
    require(frames.rows() >= 1 && frames.cols() >= 1, ErrorCode::invalid_data,
            "feature sequence '" + video_id + "' is empty");
    require(frames.allFinite(), ErrorCode::invalid_data,
            "feature sequence '" + video_id + "' contains non-finite values");
  }
};

/// Ordered set of action class names; the position of a name is its id.
class LabelSpace {
 public:
  LabelSpace() = default;

  explicit LabelSpace(std::vector<std::string> labels) : labels_(std::move(labels)) {
    for (std::size_t i = 0; i < labels_.size(); ++i) {
      require(!labels_[i].empty(), ErrorCode::invalid_data, "empty label name");
      auto [it, inserted] = index_.emplace(labels_[i], static_cast<LabelId>(i));
      require(inserted, ErrorCode::invalid_data, "duplicate label '" + labels_[i] + "'");
    }
  }

  int size() const { return static_cast<int>(labels_.size()); }
  bool contains(std::string_view name) const { return index_.count(std::string(name)) > 0; }

  LabelId id(std::string_view name) const {
    auto it = index_.find(std::string(name));
    require(it != index_.end(), ErrorCode::invalid_data,
            "unknown label '" + std::string(name) + "'");
    return it->second;
  }

  const std::string& name(LabelId id) const {
    require(id >= 0 && id < size(), ErrorCode::invalid_argument,
            "label id " + std::to_string(id) + " out of range");
    return labels_[static_cast<std::size_t>(id)];
  }

  const std::vector<std::string>& names() const { return labels_; }

  friend bool operator==(const LabelSpace& a, const LabelSpace& b) { return a.labels_ == b.labels_; }

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, LabelId> index_;
};

/// The weak annotation of one video: actions in order of occurrence.
struct Transcript {
  std::string video_id;
  std::vector<LabelId> actions;
  std::optional<std::string> activity_tag;

  int size() const { return static_cast<int>(actions.size()); }
};

struct FrameLabeling {
  std::string video_id;
  std::vector<LabelId> labels;

  int length() const { return static_cast<int>(labels.size()); }
};

/// Frame range [start_frame, end_frame], both ends inclusive and 0-based.
struct Segment {
  LabelId label = 0;
  int start_frame = 0;
  int end_frame = 0;

  int length() const { return end_frame - start_frame + 1; }
  friend bool operator==(const Segment&, const Segment&) = default;
};

struct Segmentation {
  std::vector<Segment> segments;

  int length() const { return segments.empty() ? 0 : segments.back().end_frame + 1; }

  /// Segments must tile [0, T-1] without gaps or overlaps.
  void validate() const {
    require(!segments.empty(), ErrorCode::invalid_data, "segmentation has no segments");
    int expected_start = 0;
    for (const auto& s : segments) {
      require(s.start_frame == expected_start && s.end_frame >= s.start_frame,
              ErrorCode::invalid_data, "segments are not contiguous");
      expected_start = s.end_frame + 1;
    }
  }

  friend bool operator==(const Segmentation&, const Segmentation&) = default;
};

/// Divides every feature column by its Euclidean norm over the clip.
/// All-zero columns are passed through.
inline FeatureSequence normalize_features(const FeatureSequence& seq) {
  seq.validate();
  FeatureSequence out = seq;
  for (Eigen::Index d = 0; d < out.frames.cols(); ++d) {
    const double norm = out.frames.col(d).norm();
    if (norm > 0.0) out.frames.col(d) /= norm;
  }
  return out;
}

inline FrameLabeling labeling_from_segmentation(const Segmentation& seg) {
  seg.validate();
  FrameLabeling out;
  out.labels.reserve(static_cast<std::size_t>(seg.length()));
  for (const auto& s : seg.segments) out.labels.insert(out.labels.end(), s.length(), s.label);
  return out;
}

/// Run-length groups a frame labeling. Adjacent equal labels always merge, so
/// instance splits present in the source segmentation do not survive.
inline Segmentation segmentation_from_labeling(const FrameLabeling& labeling) {
  require(!labeling.labels.empty(), ErrorCode::invalid_argument, "empty frame labeling");
  Segmentation out;
  for (int t = 0; t < labeling.length(); ++t) {
    const LabelId label = labeling.labels[static_cast<std::size_t>(t)];
    if (out.segments.empty() || out.segments.back().label != label) {
      out.segments.push_back({label, t, t});
    } else {
      out.segments.back().end_frame = t;
    }
  }
  return out;
}

}  // namespace hmmseg
