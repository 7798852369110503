// Copyright 2026 The hmmseg Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <filesystem>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "hmmseg/hmmseg.hpp"
#include "oracles.hpp"

namespace hmmseg {
namespace {

using testing::kInf;

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorCode::invalid_argument;
}

TEST(Numbers, ShortestFormRoundTrips) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double v = u(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
    EXPECT_EQ(io::parse_double(io::format_double(v)), v);
    EXPECT_EQ(io::parse_double(io::format_precise(v)), v);
  }
  EXPECT_EQ(io::format_double(-kInf), "-inf");
  EXPECT_EQ(io::parse_double("-inf"), -kInf);
  EXPECT_EQ(io::parse_double("+2.5"), 2.5);
  EXPECT_EQ(code_of([] { io::parse_double("2.5x"); }), ErrorCode::invalid_data);
  EXPECT_EQ(code_of([] { io::parse_int("7.0"); }), ErrorCode::invalid_data);
}

TEST(Features, RoundTrip) {
  FeatureSequence seq{"clip", FrameMatrix(3, 2)};
  seq.frames << 0.1, -2.0, 1e-300, 3.25, 7.0, 1.0 / 3.0;
  const auto back = io::parse_features(io::format_features(seq), "clip");
  EXPECT_EQ(back.frames, seq.frames);
  EXPECT_EQ(back.video_id, "clip");
}

TEST(Features, Malformed) {
  EXPECT_EQ(code_of([] { io::parse_features("", "v"); }), ErrorCode::invalid_data);
  EXPECT_EQ(code_of([] { io::parse_features("2 2\n1 2\n", "v"); }), ErrorCode::invalid_data);
  EXPECT_EQ(code_of([] { io::parse_features("1 2\n1\n", "v"); }), ErrorCode::invalid_data);
  EXPECT_EQ(code_of([] { io::parse_features("1 1\nnan\n", "v"); }), ErrorCode::invalid_data);
  EXPECT_EQ(code_of([] { io::read_features("/nonexistent/x.feat", "x"); }), ErrorCode::io);
}

TEST(Transcripts, RoundTripWithTags) {
  const LabelSpace labels({"take", "pour", "stir"});
  const std::vector<Transcript> in{{"a", {0, 1, 2}, "coffee"}, {"b", {2}, std::nullopt}, {"c", {1, 1}, "tea"}};
  const auto back = io::parse_transcripts(io::format_transcripts(in, labels), labels);
  ASSERT_EQ(back.size(), in.size());
  for (std::size_t i = 0; i < in.size(); ++i) {
    EXPECT_EQ(back[i].video_id, in[i].video_id);
    EXPECT_EQ(back[i].actions, in[i].actions);
    EXPECT_EQ(back[i].activity_tag, in[i].activity_tag);
  }
}

TEST(Transcripts, UnknownLabelOrMissingField) {
  const LabelSpace labels({"take"});
  EXPECT_THROW(io::parse_transcripts("a\ttake cut\n", labels), Error);
  EXPECT_THROW(io::parse_transcripts("a\n", labels), Error);
}

TEST(Labels, RoundTrip) {
  const LabelSpace labels({"x", "y", "SIL"});
  EXPECT_EQ(io::parse_labels(io::format_labels(labels)), labels);
  EXPECT_THROW(io::parse_labels("a\na\n"), Error);
}

TEST(Labelings, RoundTrip) {
  const LabelSpace labels({"a", "b"});
  const std::vector<FrameLabeling> in{{"v1", {0, 0, 1}}, {"v2", {1}}};
  const auto back = io::parse_labelings(io::format_labelings(in, labels), labels);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].labels, in[0].labels);
  EXPECT_EQ(back[1].video_id, "v2");
}

TEST(Segmentation, RoundTripAndValidation) {
  const LabelSpace labels({"a", "b"});
  const Segmentation seg{{{0, 0, 3}, {1, 4, 4}, {0, 5, 9}}};
  const std::string text = io::format_segmentation(seg, labels);
  EXPECT_EQ(text, "0 3 a\n4 4 b\n5 9 a\n");
  const auto back = io::parse_segmentation(text, labels);
  EXPECT_EQ(labeling_from_segmentation(back).labels, labeling_from_segmentation(seg).labels);
  EXPECT_THROW(io::parse_segmentation("0 3 a\n5 9 b\n", labels), Error);
}

TEST(Posteriors, RoundTripAndTolerance) {
  Matrix p(2, 3);
  p << 0.2, 0.3, 0.5, 1.0, 0.0, 0.0;
  EXPECT_EQ(io::parse_posteriors(io::format_posteriors(p)).rows(), p);
  EXPECT_NO_THROW(io::parse_posteriors("1 2\n0.5 0.5004\n"));
  EXPECT_EQ(code_of([] { io::parse_posteriors("1 2\n0.5 0.6\n"); }), ErrorCode::invalid_data);
  EXPECT_EQ(code_of([] { io::parse_posteriors("2 2\n0.5 0.5\n"); }), ErrorCode::invalid_data);
}

TEST(Priors, RoundTrip) {
  const PriorTable priors({0.125, 0.0, 0.875});
  EXPECT_EQ(io::parse_priors(io::format_priors(priors)).values(), priors.values());
  EXPECT_THROW(io::parse_priors("3\n0.5\n0.5\n"), Error);
}

ModelSet trained_models(CovarianceMode mode) {
  SynthSpec spec;
  spec.train_videos = 6;
  spec.test_videos = 0;
  spec.dim = 3;
  const auto data = synth_generate(spec);
  TrainConfig config;
  config.covariance = mode;
  config.iterations = 1;
  return train(data.train.corpus, config).models;
}

TEST(Models, SaveLoadPreservesScores) {
  for (auto mode : {CovarianceMode::full, CovarianceMode::diagonal}) {
    const ModelSet models = trained_models(mode);
    testing::TempDir dir("models");
    io::save_models(models, dir.path());
    const ModelSet back = io::load_models(dir.path());
    EXPECT_EQ(back.labels, models.labels);
    EXPECT_EQ(back.covariance, mode);
    EXPECT_EQ(back.variance_floor, models.variance_floor);
    EXPECT_EQ(back.frames_per_state, models.frames_per_state);
    ASSERT_EQ(back.emissions.size(), models.emissions.size());
    for (std::size_t e = 0; e < models.emissions.size(); ++e) {
      EXPECT_EQ(back.emissions[e].mean(), models.emissions[e].mean());
      EXPECT_EQ(back.emissions[e].covariance(), models.emissions[e].covariance());
    }
    EXPECT_EQ(io::format_model(back), io::format_model(models));
    EXPECT_FALSE(std::filesystem::exists(dir.path() / "model.txt.partial"));
  }
}

TEST(Models, TopologyMismatchIsRejected) {
  const ModelSet models = trained_models(CovarianceMode::full);
  const auto labels = io::format_labels(models.labels);
  EXPECT_THROW(io::parse_model_files(labels, "frames_per_state 10\nact0 1\n", io::format_model(models)), Error);
  EXPECT_THROW(io::parse_model_files(labels, io::format_topology(models), "dim 3\n"), Error);
  EXPECT_EQ(code_of([&] { io::load_models("/nonexistent/models"); }), ErrorCode::io);
}

TEST(Grammar, PathGrammarRoundTrip) {
  const LabelSpace labels({"a", "b", "c"});
  const std::vector<Transcript> in{{"1", {0, 1}, "x"}, {"2", {2}, std::nullopt}, {"3", {0, 1}, "x"}};
  const auto grammar = build_path_grammar(in);
  const auto back = io::parse_path_grammar(io::format_path_grammar(grammar, labels), labels);
  ASSERT_EQ(back.paths.size(), 2u);
  EXPECT_EQ(back.paths[0].count, 2);
  EXPECT_EQ(back.paths[0].activity, "x");
  EXPECT_FALSE(back.paths[1].activity);
  EXPECT_THROW(io::parse_path_grammar("0\ta\n", labels), Error);
  EXPECT_THROW(io::parse_path_grammar("1\ta\tx\n", labels), Error);
}

TEST(Grammar, BigramRoundTripIncludingImpossiblePairs) {
  const LabelSpace labels({"a", "b", "c"});
  const std::vector<Transcript> in{{"1", {0, 1, 2}, {}}, {"2", {0, 2}, {}}};
  const auto bigram = build_bigram(in, 3);
  const std::string text = io::format_bigram(bigram, labels);
  EXPECT_EQ(text.substr(0, 4), "<s> ");
  EXPECT_NE(text.find("b a -inf"), std::string::npos);
  const auto back = io::parse_bigram(text, labels);
  EXPECT_EQ(back.table(), bigram.table());
  EXPECT_THROW(io::parse_bigram("<s> a 0\na </s> -0.5\n", labels), Error);
}

TEST(Corpus, LoadPairsFeaturesWithTranscripts) {
  testing::TempDir dir("corpus");
  const LabelSpace labels({"a", "b"});
  FeatureSequence v{"vid", FrameMatrix::Constant(4, 2, 1.5)};
  io::write_file(io::feature_path(dir.path() / "f", "vid"), io::format_features(v));
  io::write_file(dir.path() / "t.txt", "vid\ta b\n");
  const auto corpus = io::load_corpus(dir.path() / "f", dir.path() / "t.txt", labels);
  EXPECT_EQ(corpus.size(), 1u);
  EXPECT_EQ(corpus.videos[0].frames, v.frames);
  EXPECT_EQ(io::list_feature_ids(dir.path() / "f"), std::vector<std::string>{"vid"});
  io::write_file(dir.path() / "t2.txt", "missing\ta\n");
  EXPECT_EQ(code_of([&] { io::load_corpus(dir.path() / "f", dir.path() / "t2.txt", labels); }), ErrorCode::io);
}

TEST(Corpus, DimensionMismatchAcrossVideos) {
  testing::TempDir dir("dims");
  const LabelSpace labels({"a"});
  io::write_file(dir.path() / "x.feat", io::format_features({"x", FrameMatrix::Zero(2, 2)}));
  io::write_file(dir.path() / "y.feat", io::format_features({"y", FrameMatrix::Zero(2, 3)}));
  io::write_file(dir.path() / "t.txt", "x\ta\ny\ta\n");
  EXPECT_EQ(code_of([&] { io::load_corpus(dir.path(), dir.path() / "t.txt", labels); }), ErrorCode::invalid_data);
}

}  // namespace
}  // namespace hmmseg
