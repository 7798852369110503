// Copyright 2026 The hmmseg Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "hmmseg/corpus.hpp"
#include "hmmseg/error.hpp"
#include "hmmseg/gaussian.hpp"
#include "hmmseg/numeric.hpp"

namespace hmmseg {

/// Strict left-to-right HMM of one action class. Each state has a self loop
/// and an arc to its successor; the final state's successor arc leaves the
/// model.
struct ActionModel {
  LabelId label = 0;
  std::vector<double> self_logprob;
  std::vector<double> forward_logprob;

  int num_states() const { return static_cast<int>(self_logprob.size()); }
};

inline ActionModel build_action_model(LabelId label, int n_states, int frames_per_state) {
  require(n_states >= 1, ErrorCode::invalid_argument, "an action model needs at least one state");
  require(frames_per_state >= 1, ErrorCode::invalid_argument, "frames_per_state must be >= 1");
  const double fps = frames_per_state;
  ActionModel model;
  model.label = label;
  model.self_logprob.assign(static_cast<std::size_t>(n_states), safe_log((fps - 1.0) / fps));
  model.forward_logprob.assign(static_cast<std::size_t>(n_states), -std::log(fps));
  return model;
}

/// Number of states so that each state covers about `frames_per_state`
/// frames of an average action.
inline int states_for_class(double mean_action_length_frames, int frames_per_state = 10) {
  require(mean_action_length_frames > 0.0 && std::isfinite(mean_action_length_frames),
          ErrorCode::invalid_argument, "mean action length must be positive");
  require(frames_per_state >= 1, ErrorCode::invalid_argument, "frames_per_state must be >= 1");
  const auto n = static_cast<int>(std::lround(mean_action_length_frames / frames_per_state));
  return std::max(1, n);
}

/// Per-label action models plus the dense numbering of their states
/// ("emission ids") used as columns of score and posterior matrices.
/// Emission ids run label by label in label-id order.
class ModelTopology {
 public:
  ModelTopology() = default;

  /// `models[label]` may be empty for labels without a model.
  explicit ModelTopology(std::vector<std::optional<ActionModel>> models) : models_(std::move(models)) {
    offsets_.reserve(models_.size());
    for (std::size_t label = 0; label < models_.size(); ++label) {
      offsets_.push_back(num_emissions_);
      if (models_[label]) {
        require(models_[label]->label == static_cast<LabelId>(label), ErrorCode::invalid_argument,
                "action model stored under the wrong label");
        num_emissions_ += models_[label]->num_states();
      }
    }
  }

  int num_labels() const { return static_cast<int>(models_.size()); }
  int num_emissions() const { return num_emissions_; }
  bool has_model(LabelId label) const {
    return label >= 0 && label < num_labels() && models_[static_cast<std::size_t>(label)].has_value();
  }

  const ActionModel& model(LabelId label) const {
    require(has_model(label), ErrorCode::missing_model, "no model for label id " + std::to_string(label));
    return *models_[static_cast<std::size_t>(label)];
  }

  int emission_id(LabelId label, int local_state) const {
    const auto& m = model(label);
    require(local_state >= 0 && local_state < m.num_states(), ErrorCode::invalid_argument,
            "local state out of range");
    return offsets_[static_cast<std::size_t>(label)] + local_state;
  }

  /// Inverse of emission_id.
  std::pair<LabelId, int> emission_owner(int emission) const {
    require(emission >= 0 && emission < num_emissions_, ErrorCode::invalid_argument,
            "emission id out of range");
    for (LabelId label = num_labels() - 1; label >= 0; --label) {
      if (has_model(label) && offsets_[static_cast<std::size_t>(label)] <= emission) {
        return {label, emission - offsets_[static_cast<std::size_t>(label)]};
      }
    }
    throw Error(ErrorCode::invalid_argument, "emission id has no owner");
  }

 private:
  std::vector<std::optional<ActionModel>> models_;
  std::vector<int> offsets_;
  int num_emissions_ = 0;
};

/// Identity of one position in a sequence-HMM.
struct StateKey {
  LabelId label = 0;
  int instance = 0;  // ordinal of the action instance in the transcript
  int local = 0;     // state ordinal inside the action model

  friend auto operator<=>(const StateKey&, const StateKey&) = default;
};

/// Bijection between global state ids of a sequence-HMM and StateKeys.
class StateIndex {
 public:
  int push(StateKey key) {
    const int id = static_cast<int>(keys_.size());
    require(ids_.emplace(key, id).second, ErrorCode::invalid_argument, "duplicate state key");
    keys_.push_back(key);
    return id;
  }

  int size() const { return static_cast<int>(keys_.size()); }

  const StateKey& key(int global_state) const {
    require(global_state >= 0 && global_state < size(), ErrorCode::invalid_argument,
            "global state id out of range");
    return keys_[static_cast<std::size_t>(global_state)];
  }

  int id(const StateKey& key) const {
    auto it = ids_.find(key);
    require(it != ids_.end(), ErrorCode::invalid_argument, "unknown state key");
    return it->second;
  }

 private:
  std::vector<StateKey> keys_;
  std::map<StateKey, int> ids_;
};

struct SequenceState {
  double self_logprob = 0.0;
  double next_logprob = 0.0;  // arc to the following position
  int emission = 0;           // score column
};

/// Action models concatenated in transcript order. Position 0 is the start
/// state and the last position is the required end state.
class SequenceHMM {
 public:
  SequenceHMM() = default;
  explicit SequenceHMM(std::vector<SequenceState> states) : states_(std::move(states)) {
    require(!states_.empty(), ErrorCode::invalid_argument, "sequence-HMM has no states");
  }

  int num_states() const { return static_cast<int>(states_.size()); }
  const SequenceState& operator[](int j) const { return states_[static_cast<std::size_t>(j)]; }
  const std::vector<SequenceState>& states() const { return states_; }

  int max_emission() const {
    int m = 0;
    for (const auto& s : states_) m = std::max(m, s.emission);
    return m;
  }

 private:
  std::vector<SequenceState> states_;
};

inline std::pair<SequenceHMM, StateIndex> concat(const Transcript& transcript, const ModelTopology& topology) {
  require(!transcript.actions.empty(), ErrorCode::invalid_argument, "empty transcript");
  std::vector<SequenceState> states;
  StateIndex index;
  for (int instance = 0; instance < transcript.size(); ++instance) {
    const LabelId label = transcript.actions[static_cast<std::size_t>(instance)];
    require(topology.has_model(label), ErrorCode::missing_model,
            "transcript of '" + transcript.video_id + "' uses label id " + std::to_string(label) +
                " which has no model");
    const ActionModel& model = topology.model(label);
    for (int j = 0; j < model.num_states(); ++j) {
      states.push_back({model.self_logprob[static_cast<std::size_t>(j)],
                        model.forward_logprob[static_cast<std::size_t>(j)], topology.emission_id(label, j)});
      index.push({label, instance, j});
    }
  }
  return {SequenceHMM(std::move(states)), std::move(index)};
}

/// Like concat, but shrinks every instance to max(1, floor(n * max_states / total))
/// states when the full sequence-HMM has more than `max_states` states. A
/// shrunk state reuses the emission and transitions of local state
/// floor(r * n / n'). Used as an opt-in fallback for short videos.
inline std::pair<SequenceHMM, StateIndex> concat_within(const Transcript& transcript,
                                                         const ModelTopology& topology, int max_states) {
  int total = 0;
  for (LabelId label : transcript.actions) total += topology.model(label).num_states();
  if (total <= max_states) return concat(transcript, topology);
  require(transcript.size() <= max_states, ErrorCode::infeasible_alignment,
          "video '" + transcript.video_id + "' has fewer frames than transcript entries");
  std::vector<SequenceState> states;
  StateIndex index;
  for (int instance = 0; instance < transcript.size(); ++instance) {
    const LabelId label = transcript.actions[static_cast<std::size_t>(instance)];
    const ActionModel& model = topology.model(label);
    const int n = model.num_states();
    const int shrunk = std::max(1, static_cast<int>(static_cast<long long>(n) * max_states / total));
    for (int r = 0; r < shrunk; ++r) {
      const int j = static_cast<int>(static_cast<long long>(r) * n / shrunk);
      states.push_back({model.self_logprob[static_cast<std::size_t>(j)],
                        model.forward_logprob[static_cast<std::size_t>(j)], topology.emission_id(label, j)});
      index.push({label, instance, r});
    }
  }
  return {SequenceHMM(std::move(states)), std::move(index)};
}

/// One state per frame plus the path log-probability.
struct StateAlignment {
  std::vector<int> states;
  double log_prob = 0.0;

  int length() const { return static_cast<int>(states.size()); }
};

namespace detail {

inline void check_lattice(const SequenceHMM& seq, const ScoreMatrix& scores) {
  const auto frames = scores.rows();
  require(frames >= 1, ErrorCode::invalid_argument, "score matrix has no frames");
  require(seq.max_emission() < scores.cols(), ErrorCode::invalid_argument,
          "score matrix does not cover every state of the sequence-HMM");
  require(frames >= seq.num_states(), ErrorCode::infeasible_alignment,
          std::to_string(frames) + " frames cannot pass through " + std::to_string(seq.num_states()) +
              " states");
}

// State j can be occupied at frame t only if j <= t (reachable from the start)
// and S-1-j <= T-1-t (end still reachable).
inline bool in_band(int t, int j, int frames, int states) {
  return j <= t && states - 1 - j <= frames - 1 - t;
}

}  // namespace detail

/// Most likely state path through `seq`. The path starts in the first state,
/// ends in the last, and visits every state. On exact ties the backtrace
/// prefers the smaller predecessor, i.e. the later transition.
inline StateAlignment viterbi_align(const SequenceHMM& seq, const ScoreMatrix& scores) {
  detail::check_lattice(seq, scores);
  const int frames = static_cast<int>(scores.rows());
  const int states = seq.num_states();

  std::vector<double> delta(static_cast<std::size_t>(states), kNegInf);
  std::vector<double> next(static_cast<std::size_t>(states), kNegInf);
  // advanced[t][j]: the best path into (t, j) came from j-1.
  std::vector<std::vector<char>> advanced(static_cast<std::size_t>(frames),
                                          std::vector<char>(static_cast<std::size_t>(states), 0));

  delta[0] = scores(0, seq[0].emission);
  for (int t = 1; t < frames; ++t) {
    std::fill(next.begin(), next.end(), kNegInf);
    const int lo = std::max(0, states - frames + t);
    const int hi = std::min(states - 1, t);
    for (int j = lo; j <= hi; ++j) {
      double best = delta[static_cast<std::size_t>(j)] + seq[j].self_logprob;
      char adv = 0;
      if (j > 0) {
        const double from_prev = delta[static_cast<std::size_t>(j - 1)] + seq[j - 1].next_logprob;
        if (from_prev >= best && from_prev != kNegInf) {
          best = from_prev;
          adv = 1;
        }
      }
      advanced[static_cast<std::size_t>(t)][static_cast<std::size_t>(j)] = adv;
      next[static_cast<std::size_t>(j)] = best == kNegInf ? kNegInf : best + scores(t, seq[j].emission);
    }
    std::swap(delta, next);
  }

  StateAlignment out;
  out.log_prob = delta[static_cast<std::size_t>(states - 1)];
  if (out.log_prob == kNegInf || std::isnan(out.log_prob)) {
    throw Error(ErrorCode::no_valid_path, "every admissible path has zero probability");
  }
  out.states.resize(static_cast<std::size_t>(frames));
  int j = states - 1;
  for (int t = frames - 1; t >= 0; --t) {
    out.states[static_cast<std::size_t>(t)] = j;
    if (t > 0 && advanced[static_cast<std::size_t>(t)][static_cast<std::size_t>(j)]) --j;
  }
  return out;
}

struct StatePosteriors {
  Matrix weights;  // frames x sequence states, rows sum to one
  double log_likelihood = 0.0;
};

/// Forward-backward occupation probabilities under the same start/end
/// pinning as viterbi_align. Computed in log space; each frame is normalized
/// after exponentiation.
inline StatePosteriors forward_backward(const SequenceHMM& seq, const ScoreMatrix& scores) {
  detail::check_lattice(seq, scores);
  const int frames = static_cast<int>(scores.rows());
  const int states = seq.num_states();

  Matrix alpha = Matrix::Constant(frames, states, kNegInf);
  Matrix beta = Matrix::Constant(frames, states, kNegInf);

  alpha(0, 0) = scores(0, seq[0].emission);
  for (int t = 1; t < frames; ++t) {
    for (int j = 0; j < states; ++j) {
      if (!detail::in_band(t, j, frames, states)) continue;
      double acc = alpha(t - 1, j) + seq[j].self_logprob;
      if (j > 0) acc = log_add_exp(alpha(t - 1, j - 1) + seq[j - 1].next_logprob, acc);
      alpha(t, j) = acc == kNegInf ? kNegInf : acc + scores(t, seq[j].emission);
    }
  }

  beta(frames - 1, states - 1) = 0.0;
  for (int t = frames - 2; t >= 0; --t) {
    for (int j = 0; j < states; ++j) {
      if (!detail::in_band(t, j, frames, states)) continue;
      double acc = beta(t + 1, j) + seq[j].self_logprob + scores(t + 1, seq[j].emission);
      if (j + 1 < states) {
        acc = log_add_exp(acc, beta(t + 1, j + 1) + seq[j].next_logprob + scores(t + 1, seq[j + 1].emission));
      }
      beta(t, j) = std::isnan(acc) ? kNegInf : acc;
    }
  }

  StatePosteriors out;
  out.log_likelihood = alpha(frames - 1, states - 1);
  if (out.log_likelihood == kNegInf || std::isnan(out.log_likelihood)) {
    throw Error(ErrorCode::no_valid_path, "every admissible path has zero probability");
  }
  out.weights = Matrix::Zero(frames, states);
  for (int t = 0; t < frames; ++t) {
    double peak = kNegInf;
    for (int j = 0; j < states; ++j) peak = std::max(peak, alpha(t, j) + beta(t, j));
    double total = 0.0;
    for (int j = 0; j < states; ++j) {
      const double g = alpha(t, j) + beta(t, j);
      const double w = g == kNegInf ? 0.0 : std::exp(g - peak);
      out.weights(t, j) = w;
      total += w;
    }
    out.weights.row(t) /= total;
  }
  return out;
}

/// Total log-likelihood of the scores under `seq` (forward recursion only).
inline double sequence_log_likelihood(const SequenceHMM& seq, const ScoreMatrix& scores) {
  detail::check_lattice(seq, scores);
  const int frames = static_cast<int>(scores.rows());
  const int states = seq.num_states();
  std::vector<double> alpha(static_cast<std::size_t>(states), kNegInf);
  std::vector<double> next(static_cast<std::size_t>(states), kNegInf);
  alpha[0] = scores(0, seq[0].emission);
  for (int t = 1; t < frames; ++t) {
    for (int j = 0; j < states; ++j) {
      if (!detail::in_band(t, j, frames, states)) {
        next[static_cast<std::size_t>(j)] = kNegInf;
        continue;
      }
      double acc = alpha[static_cast<std::size_t>(j)] + seq[j].self_logprob;
      if (j > 0) acc = log_add_exp(alpha[static_cast<std::size_t>(j - 1)] + seq[j - 1].next_logprob, acc);
      next[static_cast<std::size_t>(j)] = acc == kNegInf ? kNegInf : acc + scores(t, seq[j].emission);
    }
    std::swap(alpha, next);
  }
  return alpha[static_cast<std::size_t>(states - 1)];
}

/// Groups frames into one segment per visited HMM instance.
inline Segmentation segmentation_from_alignment(const StateAlignment& alignment, const StateIndex& index) {
  require(!alignment.states.empty(), ErrorCode::invalid_argument, "empty alignment");
  Segmentation out;
  int current_instance = -1;
  for (int t = 0; t < alignment.length(); ++t) {
    const StateKey& key = index.key(alignment.states[static_cast<std::size_t>(t)]);
    if (out.segments.empty() || key.instance != current_instance ||
        key.label != out.segments.back().label) {
      out.segments.push_back({key.label, t, t});
      current_instance = key.instance;
    } else {
      out.segments.back().end_frame = t;
    }
  }
  return out;
}

}  // namespace hmmseg
