// Copyright 2026 The hmmseg Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hmmseg/corpus.hpp"
#include "hmmseg/error.hpp"
#include "hmmseg/hmm.hpp"
#include "hmmseg/numeric.hpp"
#include "hmmseg/training.hpp"

namespace hmmseg {

struct GrammarPath {
  std::vector<LabelId> labels;
  int count = 0;
  std::optional<std::string> activity;
};

/// Finite set of admissible label sequences, in first-seen order.
struct PathGrammar {
  std::vector<GrammarPath> paths;

  int total_count() const {
    int total = 0;
    for (const auto& p : paths) total += p.count;
    return total;
  }
};

/// Merges identical transcripts. A path's activity is the tag seen most often
/// with it; ties go to the tag seen first.
inline PathGrammar build_path_grammar(std::span<const Transcript> transcripts) {
  require(!transcripts.empty(), ErrorCode::invalid_argument, "no transcripts to build a grammar from");
  PathGrammar grammar;
  std::map<std::vector<LabelId>, std::size_t> lookup;
  std::vector<std::vector<std::pair<std::string, int>>> votes;
  for (const auto& transcript : transcripts) {
    require(!transcript.actions.empty(), ErrorCode::invalid_argument, "empty transcript in grammar input");
    auto [it, inserted] = lookup.emplace(transcript.actions, grammar.paths.size());
    if (inserted) {
      grammar.paths.push_back({transcript.actions, 0, std::nullopt});
      votes.emplace_back();
    }
    grammar.paths[it->second].count += 1;
    if (transcript.activity_tag) {
      auto& tally = votes[it->second];
      auto found = std::find_if(tally.begin(), tally.end(),
                                [&](const auto& entry) { return entry.first == *transcript.activity_tag; });
      if (found == tally.end()) {
        tally.emplace_back(*transcript.activity_tag, 1);
      } else {
        found->second += 1;
      }
    }
  }
  for (std::size_t i = 0; i < grammar.paths.size(); ++i) {
    const std::pair<std::string, int>* best = nullptr;
    for (const auto& entry : votes[i]) {
      if (!best || entry.second > best->second) best = &entry;
    }
    if (best) grammar.paths[i].activity = best->first;
  }
  return grammar;
}

/// First-order label transitions with virtual start and end symbols. Row
/// `num_labels()` is the start symbol; column `num_labels()` is the end symbol.
class BigramModel {
 public:
  BigramModel() = default;
  BigramModel(int num_labels, Matrix log_probs, double smoothing = 0.0)
      : num_labels_(num_labels), log_probs_(std::move(log_probs)), smoothing_(smoothing) {
    require(num_labels >= 1, ErrorCode::invalid_argument, "bigram over zero labels");
    require(log_probs_.rows() == num_labels + 1 && log_probs_.cols() == num_labels + 1,
            ErrorCode::invalid_argument, "bigram table has the wrong shape");
    for (Eigen::Index from = 0; from < log_probs_.rows(); ++from) {
      double total = 0.0;
      for (Eigen::Index to = 0; to < log_probs_.cols(); ++to) {
        require(!std::isnan(log_probs_(from, to)) && log_probs_(from, to) <= 0.0, ErrorCode::invalid_data,
                "bigram entries must be log-probabilities");
        total += std::exp(log_probs_(from, to));
      }
      require(std::abs(total - 1.0) <= 1e-9, ErrorCode::invalid_data, "bigram row does not sum to one");
    }
  }

  int num_labels() const { return num_labels_; }
  int start_symbol() const { return num_labels_; }
  int end_symbol() const { return num_labels_; }
  double smoothing() const { return smoothing_; }
  double log_prob(int from, int to) const { return log_probs_(from, to); }
  const Matrix& table() const { return log_probs_; }

 private:
  int num_labels_ = 0;
  Matrix log_probs_;
  double smoothing_ = 0.0;
};

/// Add-k estimate p(b|a) = (count(a,b) + k) / (count(a,.) + k*V) where V
/// counts the labels plus the end symbol. A symbol that is never followed by
/// anything (possible only with k = 0) gets a uniform row; it is unreachable.
inline BigramModel build_bigram(std::span<const Transcript> transcripts, int num_labels, double smoothing = 0.0) {
  require(!transcripts.empty(), ErrorCode::invalid_argument, "no transcripts to build a bigram from");
  require(smoothing >= 0.0 && std::isfinite(smoothing), ErrorCode::invalid_argument, "smoothing must be >= 0");
  const int symbols = num_labels + 1;
  Matrix counts = Matrix::Zero(symbols, symbols);
  for (const auto& transcript : transcripts) {
    int prev = num_labels;  // start
    for (LabelId label : transcript.actions) {
      require(label >= 0 && label < num_labels, ErrorCode::invalid_argument, "label id out of range");
      counts(prev, label) += 1.0;
      prev = label;
    }
    counts(prev, num_labels) += 1.0;  // end
  }
  Matrix log_probs(symbols, symbols);
  for (int from = 0; from < symbols; ++from) {
    const double row = counts.row(from).sum() + smoothing * symbols;
    for (int to = 0; to < symbols; ++to) {
      log_probs(from, to) = row > 0.0 ? safe_log((counts(from, to) + smoothing) / row) : -std::log(double(symbols));
    }
  }
  return BigramModel(num_labels, std::move(log_probs), smoothing);
}

struct DecodeResult {
  std::vector<LabelId> transcript;
  Segmentation segmentation;
  double log_prob = kNegInf;
  std::optional<std::string> activity;
  int path = -1;  // index of the winning grammar path (path mode only)
};

struct DecodeOptions {
  /// Adds log(count / total) of each grammar path to its score.
  bool path_prior = false;
};

/// Best alignment over all grammar paths that fit into the video. Ties go to
/// the lexicographically smaller label sequence.
inline DecodeResult decode(const ModelTopology& topology, const PathGrammar& grammar, const ScoreMatrix& scores,
                           const DecodeOptions& options = {}) {
  require(!grammar.paths.empty(), ErrorCode::invalid_argument, "empty grammar");
  const int frames = static_cast<int>(scores.rows());
  const double total = grammar.total_count();
  DecodeResult best;
  bool found = false;
  for (std::size_t p = 0; p < grammar.paths.size(); ++p) {
    const GrammarPath& path = grammar.paths[p];
    Transcript transcript{"", path.labels, std::nullopt};
    int states = 0;
    for (LabelId label : path.labels) states += topology.model(label).num_states();
    if (states > frames) continue;
    auto [seq, index] = concat(transcript, topology);
    StateAlignment alignment;
    try {
      alignment = viterbi_align(seq, scores);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::no_valid_path) continue;
      throw;
    }
    double score = alignment.log_prob;
    if (options.path_prior) score += std::log(path.count / total);
    const bool better = !found || score > best.log_prob ||
                        (score == best.log_prob && path.labels < best.transcript);
    if (!better) continue;
    found = true;
    best.transcript = path.labels;
    best.segmentation = segmentation_from_alignment(alignment, index);
    best.log_prob = score;
    best.activity = path.activity;
    best.path = static_cast<int>(p);
  }
  require(found, ErrorCode::no_valid_path, "no grammar path fits into " + std::to_string(frames) + " frames");
  return best;
}

/// Single Viterbi pass over all action models at once. The final state of
/// any model may continue into the first state of any model, weighted by its
/// exit probability and the bigram term; start and end symbols pin the ends.
inline DecodeResult decode(const ModelTopology& topology, const BigramModel& bigram, const ScoreMatrix& scores) {
  const int frames = static_cast<int>(scores.rows());
  const int emissions = topology.num_emissions();
  require(frames >= 1, ErrorCode::invalid_argument, "score matrix has no frames");
  require(scores.cols() >= emissions, ErrorCode::invalid_argument, "score matrix does not cover all states");
  require(bigram.num_labels() == topology.num_labels(), ErrorCode::invalid_argument,
          "bigram and models disagree on the number of labels");

  struct StateInfo {
    LabelId label;
    int local;
    double self_logprob;
    double forward_logprob;
  };
  std::vector<StateInfo> info;
  std::vector<LabelId> modeled;
  for (LabelId label = 0; label < topology.num_labels(); ++label) {
    if (!topology.has_model(label)) continue;
    modeled.push_back(label);
    const ActionModel& m = topology.model(label);
    for (int j = 0; j < m.num_states(); ++j) {
      info.push_back({label, j, m.self_logprob[static_cast<std::size_t>(j)],
                      m.forward_logprob[static_cast<std::size_t>(j)]});
    }
  }
  auto final_of = [&](LabelId label) { return topology.emission_id(label, topology.model(label).num_states() - 1); };

  enum Arc : char { kStay = 0, kAdvance = 1, kLink = 2 };
  std::vector<double> delta(static_cast<std::size_t>(emissions), kNegInf);
  std::vector<double> next(static_cast<std::size_t>(emissions), kNegInf);
  std::vector<int> back(static_cast<std::size_t>(frames) * static_cast<std::size_t>(emissions), -1);
  std::vector<char> arc(back.size(), kStay);
  auto at = [&](int t, int e) { return static_cast<std::size_t>(t) * static_cast<std::size_t>(emissions) + static_cast<std::size_t>(e); };

  for (LabelId label : modeled) {
    const int first = topology.emission_id(label, 0);
    const double start = bigram.log_prob(bigram.start_symbol(), label);
    delta[static_cast<std::size_t>(first)] = start == kNegInf ? kNegInf : start + scores(0, first);
  }

  for (int t = 1; t < frames; ++t) {
    for (int e = 0; e < emissions; ++e) {
      const StateInfo& s = info[static_cast<std::size_t>(e)];
      double best = kNegInf;
      int from = -1;
      char kind = kStay;
      auto offer = [&](double value, int source, char how) {
        if (value > best) {
          best = value;
          from = source;
          kind = how;
        }
      };
      if (s.local > 0) {
        offer(delta[static_cast<std::size_t>(e - 1)] + info[static_cast<std::size_t>(e - 1)].forward_logprob, e - 1,
              kAdvance);
      } else {
        for (LabelId prev : modeled) {
          const int fin = final_of(prev);
          offer(delta[static_cast<std::size_t>(fin)] + info[static_cast<std::size_t>(fin)].forward_logprob +
                    bigram.log_prob(prev, s.label),
                fin, kLink);
        }
      }
      offer(delta[static_cast<std::size_t>(e)] + s.self_logprob, e, kStay);
      back[at(t, e)] = from;
      arc[at(t, e)] = kind;
      next[static_cast<std::size_t>(e)] = best == kNegInf ? kNegInf : best + scores(t, e);
    }
    std::swap(delta, next);
  }

  double best = kNegInf;
  int last = -1;
  for (LabelId label : modeled) {
    const int fin = final_of(label);
    const double value = delta[static_cast<std::size_t>(fin)] + bigram.log_prob(label, bigram.end_symbol());
    if (value > best) {
      best = value;
      last = fin;
    }
  }
  require(last >= 0 && best != kNegInf, ErrorCode::no_valid_path, "no label sequence can explain the video");

  std::vector<int> path(static_cast<std::size_t>(frames));
  std::vector<char> starts(static_cast<std::size_t>(frames), 0);
  starts[0] = 1;
  int e = last;
  for (int t = frames - 1; t >= 0; --t) {
    path[static_cast<std::size_t>(t)] = e;
    if (t > 0) {
      if (arc[at(t, e)] == kLink) starts[static_cast<std::size_t>(t)] = 1;
      e = back[at(t, e)];
    }
  }

  DecodeResult out;
  out.log_prob = best;
  for (int t = 0; t < frames; ++t) {
    const LabelId label = info[static_cast<std::size_t>(path[static_cast<std::size_t>(t)])].label;
    if (starts[static_cast<std::size_t>(t)]) {
      out.transcript.push_back(label);
      out.segmentation.segments.push_back({label, t, t});
    } else {
      out.segmentation.segments.back().end_frame = t;
    }
  }
  return out;
}

inline DecodeResult decode(const ModelSet& models, const PathGrammar& grammar, const FeatureSequence& video,
                           const DecodeOptions& options = {}) {
  return decode(models.topology, grammar, models.score(video), options);
}

inline DecodeResult decode(const ModelSet& models, const BigramModel& bigram, const FeatureSequence& video) {
  return decode(models.topology, bigram, models.score(video));
}

inline std::optional<std::string> activity_lookup(const PathGrammar& grammar, const DecodeResult& result) {
  if (result.path < 0 || result.path >= static_cast<int>(grammar.paths.size())) return std::nullopt;
  return grammar.paths[static_cast<std::size_t>(result.path)].activity;
}

}  // namespace hmmseg
