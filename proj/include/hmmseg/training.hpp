// Copyright 2026 The hmmseg Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hmmseg/corpus.hpp"
#include "hmmseg/error.hpp"
#include "hmmseg/gaussian.hpp"
#include "hmmseg/hmm.hpp"
#include "hmmseg/parallel.hpp"

namespace hmmseg {

/// Feature sequences paired index-by-index with their transcripts.
struct TrainingCorpus {
  LabelSpace labels;
  std::vector<FeatureSequence> videos;
  std::vector<Transcript> transcripts;

  std::size_t size() const { return videos.size(); }
  int dim() const { return videos.empty() ? 0 : videos.front().dim(); }

  void validate() const {
    require(!videos.empty(), ErrorCode::empty_corpus, "training corpus has no videos");
    require(videos.size() == transcripts.size(), ErrorCode::invalid_data,
            "corpus has different numbers of videos and transcripts");
    for (std::size_t i = 0; i < videos.size(); ++i) {
      videos[i].validate();
      require(videos[i].dim() == dim(), ErrorCode::invalid_data,
              "video '" + videos[i].video_id + "' has feature dimension " + std::to_string(videos[i].dim()) +
                  ", expected " + std::to_string(dim()));
      require(transcripts[i].video_id == videos[i].video_id, ErrorCode::invalid_data,
              "transcript '" + transcripts[i].video_id + "' is paired with video '" + videos[i].video_id + "'");
      require(!transcripts[i].actions.empty(), ErrorCode::invalid_data,
              "transcript of '" + transcripts[i].video_id + "' is empty");
      for (LabelId label : transcripts[i].actions) {
        require(label >= 0 && label < labels.size(), ErrorCode::invalid_data,
                "transcript of '" + transcripts[i].video_id + "' uses an unknown label");
      }
    }
  }
};

enum class UpdateMode { soft, hard };

/// How many states each action model gets.
enum class StateCountRule {
  corpus_mean,  // one count for all classes from total frames / total instances
  per_class,    // per class, from its segments in the uniform transcript split
};

struct TrainConfig {
  int iterations = 3;
  int frames_per_state = 10;
  CovarianceMode covariance = CovarianceMode::full;
  double variance_floor = kDefaultVarianceFloor;
  UpdateMode update = UpdateMode::soft;
  StateCountRule state_rule = StateCountRule::corpus_mean;
  int jobs = 1;

  void validate() const {
    require(iterations >= 0, ErrorCode::invalid_argument, "iterations must be >= 0");
    require(frames_per_state >= 1, ErrorCode::invalid_argument, "frames_per_state must be >= 1");
    require(variance_floor >= 0.0, ErrorCode::invalid_argument, "variance floor must be >= 0");
  }
};

/// All fitted action models of a corpus. `emissions[e]` is the Gaussian of
/// emission id `e` in `topology`.
struct ModelSet {
  LabelSpace labels;
  ModelTopology topology;
  std::vector<GaussianModel> emissions;
  int frames_per_state = 10;
  int iteration = 0;
  CovarianceMode covariance = CovarianceMode::full;
  double variance_floor = kDefaultVarianceFloor;
  std::vector<std::string> skipped;   // infeasible training videos
  std::vector<std::string> warnings;  // e.g. classes initialized from global statistics

  int dim() const { return emissions.empty() ? 0 : emissions.front().dim(); }

  /// Log density of every frame under every emission: T x num_emissions.
  ScoreMatrix score(const FeatureSequence& video) const {
    require(video.dim() == dim(), ErrorCode::invalid_data,
            "video '" + video.video_id + "' has dimension " + std::to_string(video.dim()) +
                " but the models expect " + std::to_string(dim()));
    ScoreMatrix out(video.length(), static_cast<Eigen::Index>(emissions.size()));
    for (std::size_t e = 0; e < emissions.size(); ++e) {
      out.col(static_cast<Eigen::Index>(e)) = emissions[e].log_density_rows(video.frames);
    }
    return out;
  }
};

/// Flat-start state path. Instance i starts at floor(i*T/k) and state j of an
/// instance of length len starts floor(j*len/n) frames in. If that equal split
/// leaves an instance with fewer frames than states, instances are instead
/// split in proportion to their state counts: instance i starts at
/// floor(c_i*T/N), where c_i counts the states before it and N is the total.
inline std::vector<int> linear_state_path(int frames, std::span<const int> instance_states) {
  require(!instance_states.empty(), ErrorCode::invalid_argument, "no instances");
  const auto k = static_cast<long long>(instance_states.size());
  long long total_states = 0;
  for (int n : instance_states) {
    require(n >= 1, ErrorCode::invalid_argument, "instance with no states");
    total_states += n;
  }
  require(frames >= total_states, ErrorCode::infeasible_alignment,
          std::to_string(frames) + " frames cannot pass through " + std::to_string(total_states) + " states");

  std::vector<long long> bounds(static_cast<std::size_t>(k + 1));
  bool fits = true;
  for (long long i = 0; i <= k; ++i) bounds[static_cast<std::size_t>(i)] = i * frames / k;
  for (long long i = 0; i < k; ++i) {
    if (bounds[static_cast<std::size_t>(i + 1)] - bounds[static_cast<std::size_t>(i)] <
        instance_states[static_cast<std::size_t>(i)]) {
      fits = false;
    }
  }
  if (!fits) {
    long long before = 0;
    for (long long i = 0; i <= k; ++i) {
      bounds[static_cast<std::size_t>(i)] = before * frames / total_states;
      if (i < k) before += instance_states[static_cast<std::size_t>(i)];
    }
  }

  std::vector<int> path(static_cast<std::size_t>(frames));
  int offset = 0;
  for (long long i = 0; i < k; ++i) {
    const long long begin = bounds[static_cast<std::size_t>(i)];
    const long long len = bounds[static_cast<std::size_t>(i + 1)] - begin;
    const long long n = instance_states[static_cast<std::size_t>(i)];
    for (long long j = 0; j < n; ++j) {
      const long long from = begin + j * len / n;
      const long long to = begin + (j + 1) * len / n;
      for (long long t = from; t < to; ++t) path[static_cast<std::size_t>(t)] = offset + static_cast<int>(j);
    }
    offset += static_cast<int>(n);
  }
  return path;
}

/// Uniform flat-start alignment of one video to its sequence-HMM.
inline StateAlignment linear_init(const FeatureSequence& video, const Transcript& transcript,
                                  const ModelTopology& topology) {
  std::vector<int> counts;
  counts.reserve(transcript.actions.size());
  for (LabelId label : transcript.actions) counts.push_back(topology.model(label).num_states());
  StateAlignment out;
  out.states = linear_state_path(video.length(), counts);
  return out;
}

/// Per-frame weights over the positions of one video's sequence-HMM.
struct FrameWeights {
  std::vector<int> emissions;  // emission id of each position
  Matrix weights;              // frames x positions
};

inline FrameWeights hard_weights(const StateAlignment& alignment, const SequenceHMM& seq) {
  FrameWeights out;
  for (const auto& s : seq.states()) out.emissions.push_back(s.emission);
  out.weights = Matrix::Zero(alignment.length(), seq.num_states());
  for (int t = 0; t < alignment.length(); ++t) out.weights(t, alignment.states[static_cast<std::size_t>(t)]) = 1.0;
  return out;
}

inline FrameWeights soft_weights(const StatePosteriors& posteriors, const SequenceHMM& seq) {
  FrameWeights out;
  for (const auto& s : seq.states()) out.emissions.push_back(s.emission);
  out.weights = posteriors.weights;
  return out;
}

/// Refits every emission from pooled per-frame weights. Statistics are shared
/// by all instances of a (label, local state). Videos without weights are
/// ignored. An emission with zero total weight keeps its parameters from
/// `previous`; if `previous` has none yet it is fitted to the whole corpus and
/// a warning is recorded.
inline ModelSet fit_from_alignments(const TrainingCorpus& corpus, std::span<const std::optional<FrameWeights>> weights,
                                    const ModelSet& previous) {
  require(weights.size() == corpus.size(), ErrorCode::invalid_argument, "one weight set per video expected");
  const int dim = corpus.dim();
  const int emissions = previous.topology.num_emissions();
  std::vector<GaussianAccumulator> stats(static_cast<std::size_t>(emissions), GaussianAccumulator(dim));

  for (std::size_t v = 0; v < corpus.size(); ++v) {
    if (!weights[v]) continue;
    const FrameWeights& fw = *weights[v];
    const FrameMatrix& x = corpus.videos[v].frames;
    require(fw.weights.rows() == x.rows(), ErrorCode::invalid_argument, "weights do not match video length");
    for (Eigen::Index t = 0; t < fw.weights.rows(); ++t) {
      for (Eigen::Index p = 0; p < fw.weights.cols(); ++p) {
        const double w = fw.weights(t, p);
        if (w > 0.0) stats[static_cast<std::size_t>(fw.emissions[static_cast<std::size_t>(p)])].add(x.row(t).transpose(), w);
      }
    }
  }

  ModelSet out = previous;
  out.emissions.clear();
  out.emissions.reserve(static_cast<std::size_t>(emissions));
  std::optional<GaussianModel> global;
  for (int e = 0; e < emissions; ++e) {
    const auto& acc = stats[static_cast<std::size_t>(e)];
    if (acc.weight() > 0.0) {
      out.emissions.push_back(acc.fit(previous.covariance, previous.variance_floor));
    } else if (static_cast<int>(previous.emissions.size()) == emissions) {
      out.emissions.push_back(previous.emissions[static_cast<std::size_t>(e)]);
    } else {
      if (!global) {
        GaussianAccumulator all(dim);
        for (const auto& video : corpus.videos) {
          for (Eigen::Index t = 0; t < video.frames.rows(); ++t) all.add(video.frames.row(t).transpose(), 1.0);
        }
        global = all.fit(previous.covariance, previous.variance_floor);
      }
      const auto [label, local] = previous.topology.emission_owner(e);
      out.warnings.push_back("state " + std::to_string(local) + " of class '" + previous.labels.name(label) +
                             "' has no aligned frames; initialized from global statistics");
      out.emissions.push_back(*global);
    }
  }
  return out;
}

namespace detail {

inline bool feasible(const FeatureSequence& video, const Transcript& transcript, const ModelTopology& topology) {
  int total = 0;
  for (LabelId label : transcript.actions) total += topology.model(label).num_states();
  return video.length() >= total;
}

inline ModelTopology build_topology(const TrainingCorpus& corpus, const TrainConfig& config) {
  const int num_labels = corpus.labels.size();
  std::vector<double> frames_of(static_cast<std::size_t>(num_labels), 0.0);
  std::vector<double> instances_of(static_cast<std::size_t>(num_labels), 0.0);
  double total_frames = 0.0;
  double total_instances = 0.0;
  for (std::size_t v = 0; v < corpus.size(); ++v) {
    const auto& actions = corpus.transcripts[v].actions;
    const auto frames = static_cast<long long>(corpus.videos[v].length());
    const auto k = static_cast<long long>(actions.size());
    total_frames += static_cast<double>(frames);
    total_instances += static_cast<double>(k);
    for (long long i = 0; i < k; ++i) {
      const auto label = static_cast<std::size_t>(actions[static_cast<std::size_t>(i)]);
      frames_of[label] += static_cast<double>((i + 1) * frames / k - i * frames / k);
      instances_of[label] += 1.0;
    }
  }
  std::vector<std::optional<ActionModel>> models(static_cast<std::size_t>(num_labels));
  for (LabelId label = 0; label < num_labels; ++label) {
    const auto l = static_cast<std::size_t>(label);
    if (instances_of[l] == 0.0) continue;
    const double mean_length = config.state_rule == StateCountRule::corpus_mean ? total_frames / total_instances
                                                                                : frames_of[l] / instances_of[l];
    models[l] = build_action_model(label, states_for_class(mean_length, config.frames_per_state),
                                   config.frames_per_state);
  }
  return ModelTopology(std::move(models));
}

}  // namespace detail

/// Models after the flat start: topology from the state-count rule, every
/// feasible video split linearly, Gaussians fitted to that hard alignment.
inline ModelSet initialize_models(const TrainingCorpus& corpus, const TrainConfig& config) {
  corpus.validate();
  config.validate();
  ModelSet seed;
  seed.labels = corpus.labels;
  seed.topology = detail::build_topology(corpus, config);
  seed.frames_per_state = config.frames_per_state;
  seed.covariance = config.covariance;
  seed.variance_floor = config.variance_floor;

  std::vector<std::optional<FrameWeights>> weights(corpus.size());
  parallel_for(corpus.size(), config.jobs, [&](std::size_t v) {
    const auto& transcript = corpus.transcripts[v];
    if (!detail::feasible(corpus.videos[v], transcript, seed.topology)) return;
    const auto [seq, index] = concat(transcript, seed.topology);
    weights[v] = hard_weights(linear_init(corpus.videos[v], transcript, seed.topology), seq);
  });
  for (std::size_t v = 0; v < corpus.size(); ++v) {
    if (!weights[v]) seed.skipped.push_back(corpus.videos[v].video_id);
  }
  require(seed.skipped.size() < corpus.size(), ErrorCode::empty_corpus,
          "every training video is shorter than its sequence-HMM");
  return fit_from_alignments(corpus, weights, seed);
}

/// Viterbi realignment and forward log-likelihood of a model set on the
/// training corpus.
struct IterationReport {
  int iteration = 0;
  double log_likelihood = 0.0;  // summed over aligned videos
  std::vector<std::optional<StateAlignment>> alignments;
  std::vector<std::optional<StateIndex>> indices;
};

struct ReestimationStep {
  ModelSet next;
  IterationReport report;  // of the model set the step started from
};

/// One iteration: score, compute per-frame weights (forward-backward or
/// Viterbi), refit. Transitions are left unchanged.
inline ReestimationStep reestimate_step(const ModelSet& models, const TrainingCorpus& corpus,
                                        const TrainConfig& config) {
  const std::size_t n = corpus.size();
  std::vector<std::optional<FrameWeights>> weights(n);
  std::vector<double> log_likelihood(n, 0.0);
  IterationReport report;
  report.iteration = models.iteration;
  report.alignments.resize(n);
  report.indices.resize(n);

  parallel_for(n, config.jobs, [&](std::size_t v) {
    const auto& video = corpus.videos[v];
    const auto& transcript = corpus.transcripts[v];
    if (!detail::feasible(video, transcript, models.topology)) return;
    auto [seq, index] = concat(transcript, models.topology);
    const ScoreMatrix scores = models.score(video);
    StatePosteriors posteriors = forward_backward(seq, scores);
    StateAlignment path = viterbi_align(seq, scores);
    log_likelihood[v] = posteriors.log_likelihood;
    weights[v] = config.update == UpdateMode::soft ? soft_weights(posteriors, seq) : hard_weights(path, seq);
    report.alignments[v] = std::move(path);
    report.indices[v] = std::move(index);
  });
  for (double ll : log_likelihood) report.log_likelihood += ll;

  ReestimationStep step{fit_from_alignments(corpus, weights, models), std::move(report)};
  step.next.iteration = models.iteration + 1;
  return step;
}

inline ModelSet reestimate(const ModelSet& models, const TrainingCorpus& corpus, const TrainConfig& config) {
  return reestimate_step(models, corpus, config).next;
}

/// Viterbi realignment report without refitting.
inline IterationReport realign(const ModelSet& models, const TrainingCorpus& corpus, int jobs = 1) {
  const std::size_t n = corpus.size();
  std::vector<double> log_likelihood(n, 0.0);
  IterationReport report;
  report.iteration = models.iteration;
  report.alignments.resize(n);
  report.indices.resize(n);
  parallel_for(n, jobs, [&](std::size_t v) {
    const auto& video = corpus.videos[v];
    const auto& transcript = corpus.transcripts[v];
    if (!detail::feasible(video, transcript, models.topology)) return;
    auto [seq, index] = concat(transcript, models.topology);
    const ScoreMatrix scores = models.score(video);
    log_likelihood[v] = sequence_log_likelihood(seq, scores);
    report.alignments[v] = viterbi_align(seq, scores);
    report.indices[v] = std::move(index);
  });
  for (double ll : log_likelihood) report.log_likelihood += ll;
  return report;
}

struct TrainResult {
  ModelSet models;
  std::vector<IterationReport> history;  // iteration 0 (flat start) .. config.iterations
};

inline TrainResult train(const TrainingCorpus& corpus, const TrainConfig& config) {
  TrainResult result{initialize_models(corpus, config), {}};
  for (int i = 0; i < config.iterations; ++i) {
    ReestimationStep step = reestimate_step(result.models, corpus, config);
    result.history.push_back(std::move(step.report));
    result.models = std::move(step.next);
  }
  result.history.push_back(realign(result.models, corpus, config.jobs));
  return result;
}

/// Scores one video; the default is ModelSet::score.
using VideoScorer = std::function<ScoreMatrix(const ModelSet&, const FeatureSequence&, std::size_t video)>;

struct AlignOptions {
  int jobs = 1;
  bool shrink_infeasible = false;  // rebuild short videos' sequence-HMMs with fewer states
  VideoScorer scorer;
};

struct AlignedVideo {
  StateAlignment alignment;
  StateIndex index;
  Segmentation segmentation;
  std::vector<int> emissions;  // emission id of every frame
};

struct CorpusAlignment {
  std::vector<std::optional<AlignedVideo>> videos;
  std::vector<std::string> skipped;
};

/// Transcript-given alignment of every video.
inline CorpusAlignment align_corpus(const ModelSet& models, const TrainingCorpus& corpus,
                                    const AlignOptions& options = {}) {
  corpus.validate();
  CorpusAlignment out;
  out.videos.resize(corpus.size());
  parallel_for(corpus.size(), options.jobs, [&](std::size_t v) {
    const auto& video = corpus.videos[v];
    const auto& transcript = corpus.transcripts[v];
    const bool fits = detail::feasible(video, transcript, models.topology);
    if (!fits && !(options.shrink_infeasible && video.length() >= transcript.size())) return;
    auto [seq, index] = fits ? concat(transcript, models.topology)
                             : concat_within(transcript, models.topology, video.length());
    const ScoreMatrix scores = options.scorer ? options.scorer(models, video, v) : models.score(video);
    AlignedVideo aligned{viterbi_align(seq, scores), std::move(index), {}, {}};
    aligned.segmentation = segmentation_from_alignment(aligned.alignment, aligned.index);
    for (int s : aligned.alignment.states) aligned.emissions.push_back(seq[s].emission);
    out.videos[v] = std::move(aligned);
  });
  for (std::size_t v = 0; v < corpus.size(); ++v) {
    if (!out.videos[v]) out.skipped.push_back(corpus.videos[v].video_id);
  }
  return out;
}

/// Emission-id path of an alignment (for prior estimation).
inline std::vector<int> emission_path(const StateAlignment& alignment, const StateIndex& index,
                                      const ModelTopology& topology) {
  std::vector<int> out;
  out.reserve(alignment.states.size());
  for (int s : alignment.states) {
    const StateKey& key = index.key(s);
    out.push_back(topology.emission_id(key.label, key.local));
  }
  return out;
}

}  // namespace hmmseg
