// Copyright 2026 The hmmseg Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "hmmseg/corpus.hpp"
#include "hmmseg/error.hpp"
#include "hmmseg/gaussian.hpp"
#include "hmmseg/hmm.hpp"
#include "hmmseg/io.hpp"
#include "hmmseg/training.hpp"

namespace hmmseg {

enum class GrammarStyle { random, templates };

/// Parameters of a planted corpus. Every generating state has its own mean on
/// a lattice with spacing `separation * sigma` and isotropic variance sigma^2.
struct SynthSpec {
  int classes = 3;
  int min_states = 2;
  int max_states = 4;
  int dim = 8;
  double separation = 6.0;
  double sigma = 1.0;
  int train_videos = 20;
  int test_videos = 10;
  int min_actions = 2;
  int max_actions = 5;
  GrammarStyle grammar = GrammarStyle::random;
  int templates = 4;
  int frames_per_state = 10;
  std::uint64_t seed = 1;

  void validate() const {
    require(classes >= 1 && min_states >= 1 && max_states >= min_states && dim >= 1, ErrorCode::invalid_argument,
            "synth spec needs classes >= 1, 1 <= min_states <= max_states and dim >= 1");
    require(separation > 0.0 && sigma > 0.0, ErrorCode::invalid_argument, "separation and sigma must be positive");
    require(train_videos >= 1 && test_videos >= 0, ErrorCode::invalid_argument, "need at least one training video");
    require(min_actions >= 1 && max_actions >= min_actions, ErrorCode::invalid_argument,
            "need 1 <= min_actions <= max_actions");
    require(templates >= 1 && frames_per_state >= 1, ErrorCode::invalid_argument,
            "templates and frames_per_state must be >= 1");
  }
};

/// Random source for synthetic data: std::mt19937_64 seeded with the spec
/// seed. Uniform reals use the top 53 bits; normals use Box-Muller with the
/// sine variate cached for the next call.
class SynthRandom {
 public:
  explicit SynthRandom(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Integer in [lo, hi], by modulo reduction.
  int uniform_int(int lo, int hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(engine_() % span);
  }

  double normal() {
    if (cached_) {
      cached_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    cached_ = true;
    return radius * std::cos(angle);
  }

  /// Frames spent in a state with self-loop probability `stay`: at least one.
  int dwell(double stay) {
    int frames = 1;
    while (uniform() < stay) ++frames;
    return frames;
  }

  std::uint64_t raw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  bool cached_ = false;
  double spare_ = 0.0;
};

struct SynthSplit {
  TrainingCorpus corpus;
  std::vector<FrameLabeling> ground_truth;
};

struct SynthData {
  LabelSpace labels;
  SynthSplit train;
  SynthSplit test;
  ModelSet generator;
};

namespace detail {

inline std::vector<LabelId> sample_transcript(const SynthSpec& spec, SynthRandom& rng) {
  const int k = rng.uniform_int(spec.min_actions, spec.max_actions);
  std::vector<LabelId> actions;
  for (int i = 0; i < k; ++i) {
    LabelId label = rng.uniform_int(0, spec.classes - 1);
    // No immediate repeats, so every ground-truth segment boundary is visible.
    if (spec.classes > 1 && !actions.empty() && label == actions.back()) {
      label = (label + 1 + rng.uniform_int(0, spec.classes - 2)) % spec.classes;
    }
    actions.push_back(label);
  }
  return actions;
}

inline SynthSplit sample_split(const SynthSpec& spec, const SynthData& data, std::string_view prefix, int videos,
                               const std::vector<Transcript>& templates, SynthRandom& rng) {
  SynthSplit split;
  split.corpus.labels = data.labels;
  const double stay = (spec.frames_per_state - 1.0) / spec.frames_per_state;
  for (int v = 0; v < videos; ++v) {
    char id[32];
    std::snprintf(id, sizeof(id), "%.*s_%04d", static_cast<int>(prefix.size()), prefix.data(), v);
    Transcript transcript{id, {}, std::nullopt};
    if (spec.grammar == GrammarStyle::templates) {
      const auto& chosen = templates[static_cast<std::size_t>(rng.uniform_int(0, spec.templates - 1))];
      transcript.actions = chosen.actions;
      transcript.activity_tag = chosen.activity_tag;
    } else {
      transcript.actions = sample_transcript(spec, rng);
    }

    std::vector<int> emissions;
    FrameLabeling truth{id, {}};
    for (LabelId label : transcript.actions) {
      const int states = data.generator.topology.model(label).num_states();
      for (int j = 0; j < states; ++j) {
        const int frames = rng.dwell(stay);
        emissions.insert(emissions.end(), frames, data.generator.topology.emission_id(label, j));
        truth.labels.insert(truth.labels.end(), frames, label);
      }
    }
    FeatureSequence video{id, FrameMatrix(static_cast<Eigen::Index>(emissions.size()), spec.dim)};
    for (std::size_t t = 0; t < emissions.size(); ++t) {
      const Vector& mean = data.generator.emissions[static_cast<std::size_t>(emissions[t])].mean();
      for (int d = 0; d < spec.dim; ++d) {
        video.frames(static_cast<Eigen::Index>(t), d) = mean(d) + spec.sigma * rng.normal();
      }
    }
    split.corpus.videos.push_back(std::move(video));
    split.corpus.transcripts.push_back(std::move(transcript));
    split.ground_truth.push_back(std::move(truth));
  }
  return split;
}

}  // namespace detail

/// Deterministic planted corpus: generating models, a training split and a
/// test split with frame-level ground truth.
inline SynthData synth_generate(const SynthSpec& spec) {
  spec.validate();
  SynthRandom rng(spec.seed);
  SynthData data;

  std::vector<std::string> names;
  for (int c = 0; c < spec.classes; ++c) names.push_back("act" + std::to_string(c));
  data.labels = LabelSpace(names);

  std::vector<std::optional<ActionModel>> actions(static_cast<std::size_t>(spec.classes));
  int total_states = 0;
  for (LabelId c = 0; c < spec.classes; ++c) {
    const int n = rng.uniform_int(spec.min_states, spec.max_states);
    actions[static_cast<std::size_t>(c)] = build_action_model(c, n, spec.frames_per_state);
    total_states += n;
  }

  // Smallest lattice base whose points outnumber the states.
  int base = 2;
  auto capacity = [&](int b) {
    double cap = 1.0;
    for (int d = 0; d < spec.dim && cap < 4e18; ++d) cap *= b;
    return cap;
  };
  while (capacity(base) < total_states) ++base;
  const auto points = static_cast<std::uint64_t>(std::min(capacity(base), 4e18));
  std::set<std::uint64_t> used;
  ModelSet& gen = data.generator;
  gen.labels = data.labels;
  gen.topology = ModelTopology(std::move(actions));
  gen.frames_per_state = spec.frames_per_state;
  gen.covariance = CovarianceMode::full;
  gen.variance_floor = 0.0;
  const Matrix cov = Matrix::Identity(spec.dim, spec.dim) * (spec.sigma * spec.sigma);
  for (int e = 0; e < total_states; ++e) {
    std::uint64_t point = rng.raw() % points;
    while (!used.insert(point).second) point = rng.raw() % points;
    Vector mean = Vector::Zero(spec.dim);
    for (int d = 0; d < spec.dim && point > 0; ++d) {
      mean(d) = static_cast<double>(point % static_cast<std::uint64_t>(base)) * spec.separation * spec.sigma;
      point /= static_cast<std::uint64_t>(base);
    }
    gen.emissions.emplace_back(std::move(mean), cov, CovarianceMode::full);
  }

  std::vector<Transcript> templates;
  if (spec.grammar == GrammarStyle::templates) {
    for (int i = 0; i < spec.templates; ++i) {
      templates.push_back({"", detail::sample_transcript(spec, rng), "activity" + std::to_string(i)});
    }
  }
  data.train = detail::sample_split(spec, data, "train", spec.train_videos, templates, rng);
  data.test = detail::sample_split(spec, data, "test", spec.test_videos, templates, rng);
  return data;
}

/// `key = value` lines; unknown keys are errors, missing keys keep defaults.
inline SynthSpec parse_synth_spec(std::string_view text) {
  SynthSpec spec;
  for (auto line : io::lines(text)) {
    if (line.find_first_not_of(" \t") != std::string_view::npos && line[line.find_first_not_of(" \t")] == '#') continue;
    const auto eq = line.find('=');
    require(eq != std::string_view::npos, ErrorCode::invalid_data, "synth spec line must be 'key = value'");
    const auto key_tokens = io::tokens(line.substr(0, eq));
    const auto value_tokens = io::tokens(line.substr(eq + 1));
    require(key_tokens.size() == 1 && value_tokens.size() == 1, ErrorCode::invalid_data,
            "synth spec line must be 'key = value'");
    const auto key = key_tokens[0];
    const auto value = value_tokens[0];
    auto as_int = [&] { return static_cast<int>(io::parse_int(value)); };
    if (key == "classes") spec.classes = as_int();
    else if (key == "min_states") spec.min_states = as_int();
    else if (key == "max_states") spec.max_states = as_int();
    else if (key == "dim") spec.dim = as_int();
    else if (key == "separation") spec.separation = io::parse_double(value);
    else if (key == "sigma") spec.sigma = io::parse_double(value);
    else if (key == "train_videos") spec.train_videos = as_int();
    else if (key == "test_videos") spec.test_videos = as_int();
    else if (key == "min_actions") spec.min_actions = as_int();
    else if (key == "max_actions") spec.max_actions = as_int();
    else if (key == "templates") spec.templates = as_int();
    else if (key == "frames_per_state") spec.frames_per_state = as_int();
    else if (key == "seed") spec.seed = static_cast<std::uint64_t>(io::parse_int(value));
    else if (key == "grammar") {
      if (value == "random") spec.grammar = GrammarStyle::random;
      else if (value == "templates") spec.grammar = GrammarStyle::templates;
      else throw Error(ErrorCode::invalid_data, "grammar must be 'random' or 'templates'");
    } else {
      throw Error(ErrorCode::invalid_data, "unknown synth spec key '" + std::string(key) + "'");
    }
  }
  spec.validate();
  return spec;
}

/// Writes labels.txt, generator/ (planted models) and per split
/// features/*.feat, transcripts.txt and gt.txt.
inline void write_synth(const SynthData& data, const io::fs::path& dir) {
  io::write_file(dir / "labels.txt", io::format_labels(data.labels));
  io::save_models(data.generator, dir / "generator");
  auto write_split = [&](const SynthSplit& split, const char* name) {
    const auto root = dir / name;
    io::fs::create_directories(root / "features");
    for (const auto& video : split.corpus.videos) {
      io::write_file(io::feature_path(root / "features", video.video_id), io::format_features(video));
    }
    io::write_file(root / "transcripts.txt", io::format_transcripts(split.corpus.transcripts, data.labels));
    io::write_file(root / "gt.txt", io::format_labelings(split.ground_truth, data.labels));
  };
  write_split(data.train, "train");
  if (!data.test.corpus.videos.empty()) write_split(data.test, "test");
}

}  // namespace hmmseg
