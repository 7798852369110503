// Copyright 2026 The hmmseg Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "hmmseg/hmmseg.hpp"
#include "oracles.hpp"

namespace hmmseg {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b, c, d);
  return buf;
}

ModelTopology topology_with(const std::vector<int>& states, int fps) {
  std::vector<std::optional<ActionModel>> models;
  for (std::size_t l = 0; l < states.size(); ++l) {
    models.push_back(build_action_model(static_cast<LabelId>(l), states[l], fps));
  }
  return ModelTopology(std::move(models));
}

bool admissible(const std::vector<int>& path, int states) {
  if (path.empty() || path.front() != 0 || path.back() != states - 1) return false;
  for (std::size_t t = 1; t < path.size(); ++t) {
    const int step = path[t] - path[t - 1];
    if (step != 0 && step != 1) return false;
  }
  return true;
}

Outcome viterbi_exactness() {
  const auto start = Clock::now();
  std::mt19937_64 rng(20260101);
  double worst = 0.0;
  bool ok = true;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto lattice = testing::random_lattice(rng, 8, 6);
    const auto brute = testing::brute_viterbi(lattice.seq, lattice.scores);
    const auto a = viterbi_align(lattice.seq, lattice.scores);
    worst = std::max(worst, std::abs(a.log_prob - brute.best));
    ok = ok && admissible(a.states, lattice.seq.num_states()) &&
         std::abs(testing::path_log_prob(lattice.seq, lattice.scores, a.states) - brute.best) <= 1e-9;
  }
  const double elapsed = seconds_since(start);
  return {ok && worst <= 1e-9 && elapsed < 10.0,
          fmt("1000 instances, max |diff| %.2e, %.2f s", worst, elapsed)};
}

Outcome forward_backward_exactness() {
  std::mt19937_64 rng(20260102);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto lattice = testing::random_lattice(rng, 8, 6);
    double ll = 0.0;
    const Matrix brute = testing::brute_posteriors(lattice.seq, lattice.scores, &ll);
    const auto fb = forward_backward(lattice.seq, lattice.scores);
    worst = std::max(worst, (fb.weights - brute).cwiseAbs().maxCoeff());
    worst = std::max(worst, std::abs(fb.log_likelihood - ll));
  }
  return {worst <= 1e-9, fmt("1000 instances, max |diff| %.2e", worst)};
}

Outcome gaussian_correctness() {
  const double half_log_2pi = 0.5 * std::log(2.0 * std::numbers::pi);
  const GaussianModel g1(Vector::Zero(1), Matrix::Identity(1, 1), CovarianceMode::full);
  const GaussianModel g2(Vector::Zero(2), Matrix::Identity(2, 2), CovarianceMode::full);
  double point_err = std::abs(g1.log_density(Vector::Zero(1)) + half_log_2pi);
  point_err = std::max(point_err, std::abs(g1.log_density(Vector::Ones(1)) + half_log_2pi + 0.5));
  point_err = std::max(point_err, std::abs(g2.log_density(Vector::Zero(2)) + 2.0 * half_log_2pi));

  double quad_err = 0.0;
  for (double variance : {0.04, 1.0, 9.0}) {
    const double sigma = std::sqrt(variance);
    const GaussianModel g(Vector::Constant(1, -1.5), Matrix::Constant(1, 1, variance), CovarianceMode::full);
    const int steps = 20000;
    const double lo = -1.5 - 8.0 * sigma;
    const double h = 16.0 * sigma / steps;
    double sum = 0.0;
    for (int i = 0; i <= steps; ++i) {
      const double w = (i == 0 || i == steps) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      sum += w * std::exp(g.log_density(Vector::Constant(1, lo + i * h)));
    }
    quad_err = std::max(quad_err, std::abs(sum * h / 3.0 - 1.0));
  }

  FrameMatrix x(2, 1);
  x << 0.0, 2.0;
  const std::vector<double> w{3.0, 1.0};
  const auto fit = fit_weighted(x, w, CovarianceMode::full, 0.0);
  const bool exact = fit.mean()(0) == 0.5 && fit.covariance()(0, 0) == 0.75;
  return {point_err <= 1e-9 && quad_err <= 1e-6 && exact,
          fmt("points %.1e, quadrature %.1e, fit (%.17g, %.17g)", point_err, quad_err, fit.mean()(0),
              fit.covariance()(0, 0))};
}

Outcome em_monotonicity() {
  double worst_drop = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    SynthSpec spec;
    spec.seed = 1000 + seed;
    spec.separation = 2.0 + 0.25 * static_cast<double>(seed % 8);
    spec.train_videos = 12;
    spec.test_videos = 0;
    spec.dim = 4;
    const auto data = synth_generate(spec);
    TrainConfig config;
    config.iterations = 6;
    const auto result = train(data.train.corpus, config);
    for (std::size_t i = 1; i < result.history.size(); ++i) {
      worst_drop = std::max(worst_drop, result.history[i - 1].log_likelihood - result.history[i].log_likelihood);
    }
  }
  return {worst_drop <= 1e-6, fmt("20 corpora x 6 iterations, largest decrease %.2e", worst_drop)};
}

double alignment_mof(const SynthSplit& split, const IterationReport& report) {
  std::vector<FrameLabeling> hyp;
  for (std::size_t v = 0; v < split.corpus.size(); ++v) {
    auto fl = labeling_from_segmentation(segmentation_from_alignment(*report.alignments[v], *report.indices[v]));
    fl.video_id = split.corpus.videos[v].video_id;
    hyp.push_back(std::move(fl));
  }
  return mof(split.ground_truth, hyp);
}

Outcome synthetic_ordering() {
  const auto start = Clock::now();
  const auto data = synth_generate(SynthSpec{});
  TrainConfig config;
  config.jobs = 1;
  const auto result = train(data.train.corpus, config);
  std::vector<FrameLabeling> naive_hyp;
  for (std::size_t v = 0; v < data.train.corpus.size(); ++v) {
    naive_hyp.push_back(testing::uniform_split_labeling(data.train.corpus.videos[v], data.train.corpus.transcripts[v]));
  }
  const double naive = mof(data.train.ground_truth, naive_hyp);
  const double init = alignment_mof(data.train, result.history.front());
  const double final = alignment_mof(data.train, result.history.at(3));
  const double elapsed = seconds_since(start);
  return {naive < init && init < final && final >= 0.90 && elapsed < 60.0,
          fmt("naive %.4f < init %.4f < iter3 %.4f, %.2f s", naive, init, final, elapsed)};
}

Outcome grammar_exactness() {
  std::mt19937_64 rng(20260106);
  std::normal_distribution<double> n;
  double worst = 0.0;
  bool ok = true;
  int decoded = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const int classes = 2 + static_cast<int>(rng() % 2);
    std::vector<int> states;
    for (int c = 0; c < classes; ++c) states.push_back(1 + static_cast<int>(rng() % 2));
    const auto topo = topology_with(states, 2 + static_cast<int>(rng() % 5));
    std::vector<Transcript> in;
    for (int i = 0; i < 4; ++i) {
      std::vector<LabelId> a;
      for (int k = 0; k < 1 + static_cast<int>(rng() % 3); ++k) a.push_back(static_cast<LabelId>(rng() % classes));
      in.push_back(Transcript{"v", a, {}});
    }
    const auto bigram = build_bigram(in, classes, trial % 2 ? 0.0 : 0.3);
    const int frames = 1 + static_cast<int>(rng() % 8);
    Matrix scores(frames, topo.num_emissions());
    for (Eigen::Index i = 0; i < scores.size(); ++i) scores.data()[i] = 2.0 * n(rng);
    const auto brute = testing::brute_bigram(topo, bigram, scores);
    if (brute.best == -testing::kInf) {
      bool threw = false;
      try {
        decode(topo, bigram, scores);
      } catch (const Error&) {
        threw = true;
      }
      ok = ok && threw;
      continue;
    }
    worst = std::max(worst, std::abs(decode(topo, bigram, scores).log_prob - brute.best));
    ++decoded;
  }

  bool identical = true;
  const auto topo = topology_with({2, 3, 1}, 10);
  const std::vector<LabelId> labels{1, 0, 2, 0};
  const Transcript transcript{"v", labels, {}};
  const auto [seq, index] = concat(transcript, topo);
  for (int trial = 0; trial < 50; ++trial) {
    Matrix scores(8 + static_cast<int>(rng() % 30), topo.num_emissions());
    for (Eigen::Index i = 0; i < scores.size(); ++i) scores.data()[i] = n(rng);
    const std::vector<Transcript> one{transcript};
    const auto result = decode(topo, build_path_grammar(one), scores);
    const auto alignment = viterbi_align(seq, scores);
    const auto expected = labeling_from_segmentation(segmentation_from_alignment(alignment, index));
    identical = identical && result.log_prob == alignment.log_prob &&
                labeling_from_segmentation(result.segmentation).labels == expected.labels;
  }
  return {ok && identical && worst <= 1e-9,
          fmt("bigram max |diff| %.2e over %.0f instances, single path identical %.0f", worst, decoded,
              identical ? 1.0 : 0.0)};
}

Outcome metric_suite() {
  const std::vector<FrameLabeling> gt{{"v", {0, 0, 1, 1}}};
  const std::vector<FrameLabeling> hyp{{"v", {0, 1, 1, 1}}};
  const auto r = evaluate(gt, hyp);
  const bool worked = r.mof == 0.75 && r.moc == 0.75 && r.jacc_iou == 7.0 / 12.0 && r.jacc_iod == 5.0 / 6.0;
  const auto id = evaluate(hyp, hyp);
  const bool identity = id.mof == 1.0 && id.moc == 1.0 && id.jacc_iou == 1.0 && id.jacc_iod == 1.0;
  std::mt19937_64 rng(20260107);
  int violations = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    FrameLabeling g{"v", {}}, h{"v", {}};
    const int frames = 1 + static_cast<int>(rng() % 40);
    for (int t = 0; t < frames; ++t) {
      g.labels.push_back(static_cast<LabelId>(rng() % 5));
      h.labels.push_back(static_cast<LabelId>(rng() % 5));
    }
    const auto m = evaluate(std::vector<FrameLabeling>{g}, std::vector<FrameLabeling>{h});
    if (m.jacc_iod < m.jacc_iou) ++violations;
  }
  return {worked && identity && violations == 0,
          fmt("worked example %.0f, identity %.0f, IoD < IoU in %.0f/1000", worked ? 1.0 : 0.0,
              identity ? 1.0 : 0.0, violations)};
}

Outcome posterior_round_trip() {
  std::mt19937_64 rng(20260108);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int states = 2 + static_cast<int>(rng() % 6);
    std::vector<double> prior(static_cast<std::size_t>(states));
    for (auto& p : prior) p = u(rng) < 0.2 ? 0.0 : u(rng);
    prior[0] += 0.1;
    double total = 0.0;
    for (double p : prior) total += p;
    for (auto& p : prior) p /= total;
    Matrix post(6, states);
    for (Eigen::Index t = 0; t < post.rows(); ++t) {
      for (int s = 0; s < states; ++s) post(t, s) = prior[static_cast<std::size_t>(s)] > 0.0 ? u(rng) : 0.0;
      post.row(t) /= post.row(t).sum();
    }
    const PriorTable table(prior);
    const ScoreMatrix scaled = posterior_to_loglikelihood(PosteriorMatrix(post), table);
    for (Eigen::Index t = 0; t < post.rows(); ++t) {
      Vector back(states);
      for (int s = 0; s < states; ++s) back(s) = std::exp(scaled(t, s)) * prior[static_cast<std::size_t>(s)];
      back /= back.sum();
      worst = std::max(worst, (back.transpose() - post.row(t)).cwiseAbs().maxCoeff());
    }
  }

  // Decoding with each score source over the synthetic training corpus.
  const auto data = synth_generate(SynthSpec{});
  const auto trained = train(data.train.corpus, TrainConfig{});
  std::vector<std::vector<int>> paths;
  const auto& last = trained.history.back();
  for (std::size_t v = 0; v < last.alignments.size(); ++v) {
    if (last.alignments[v]) {
      paths.push_back(emission_path(*last.alignments[v], *last.indices[v], trained.models.topology));
    }
  }
  const PriorTable priors = estimate_priors(paths, trained.models.topology.num_emissions());
  std::vector<ScoreMatrix> gauss, ext;
  for (const auto& video : data.train.corpus.videos) {
    const ScoreMatrix g = trained.models.score(video);
    Matrix p(g.rows(), g.cols());
    for (Eigen::Index t = 0; t < g.rows(); ++t) {
      const double top = g.row(t).maxCoeff();
      for (Eigen::Index s = 0; s < g.cols(); ++s) {
        p(t, s) = std::exp(g(t, s) - top) * priors.values()[static_cast<std::size_t>(s)];
      }
      p.row(t) /= p.row(t).sum();
    }
    gauss.push_back(g);
    ext.push_back(posterior_to_loglikelihood(PosteriorMatrix(p), priors));
  }
  double mean_err = 0.0;
  bool complete = true;
  for (int mode = 0; mode < 3; ++mode) {
    AlignOptions options;
    options.scorer = [&](const ModelSet&, const FeatureSequence&, std::size_t v) -> ScoreMatrix {
      if (mode == 0) return ext[v];
      if (mode == 1) return gauss[v];
      const ScoreMatrix m = combine_scores(gauss[v], ext[v]);
      for (Eigen::Index i = 0; i < m.size(); ++i) {
        const double a = gauss[v].data()[i], b = ext[v].data()[i];
        if (a == -testing::kInf && b == -testing::kInf) continue;
        const double hi = std::max(a, b);
        const double expected = hi + std::log(0.5 * (std::exp(a - hi) + std::exp(b - hi)));
        mean_err = std::max(mean_err, std::abs(m.data()[i] - expected));
      }
      return m;
    };
    const auto aligned = align_corpus(trained.models, data.train.corpus, options);
    for (const auto& v : aligned.videos) complete = complete && v.has_value();
  }
  return {worst <= 1e-12 && complete && mean_err <= 1e-12,
          fmt("round trip max |diff| %.2e, ext/gauss/mean complete %.0f, log-mean |diff| %.2e", worst,
              complete ? 1.0 : 0.0, mean_err)};
}

int run_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"hmmseg"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  if (code != 0) std::fprintf(stderr, "%s", err.str().c_str());
  return code;
}

std::string snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file()) files[fs::relative(entry.path(), dir).string()] = io::read_file(entry.path());
  }
  std::string all;
  for (const auto& [name, content] : files) all += "==" + name + "\n" + content;
  return all;
}

Outcome determinism() {
  testing::TempDir dir("acceptance");
  const fs::path data = dir.path() / "data";
  if (run_cli({"synth", "--out", data.string(), "--seed", "3"}) != 0) return {false, "synth failed"};
  std::vector<std::string> snapshots;
  for (const char* jobs : {"1", "1", "3", "3"}) {
    const fs::path run_dir = dir.path() / ("run" + std::to_string(snapshots.size()));
    const int trained = run_cli({"train", "--features", (data / "train/features").string(), "--transcripts",
                                 (data / "train/transcripts.txt").string(), "--labels",
                                 (data / "labels.txt").string(), "--out", (run_dir / "models").string(), "--jobs",
                                 jobs});
    const int aligned = run_cli({"align", "--models", (run_dir / "models").string(), "--features",
                                 (data / "train/features").string(), "--transcripts",
                                 (data / "train/transcripts.txt").string(), "--out", (run_dir / "ali").string(),
                                 "--jobs", jobs});
    if (trained != 0 || aligned != 0) return {false, "train or align failed"};
    snapshots.push_back(snapshot(run_dir));
  }
  const bool same = std::all_of(snapshots.begin(), snapshots.end(), [&](const auto& s) { return s == snapshots[0]; });
  return {same, fmt("4 runs (jobs 1,1,3,3), %.0f bytes each, identical %.0f", static_cast<double>(snapshots[0].size()),
                    same ? 1.0 : 0.0)};
}

}  // namespace
}  // namespace hmmseg

int main() {
  using hmmseg::Outcome;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"viterbi-exactness", hmmseg::viterbi_exactness},
      {"forward-backward-exactness", hmmseg::forward_backward_exactness},
      {"gaussian-correctness", hmmseg::gaussian_correctness},
      {"em-monotonicity", hmmseg::em_monotonicity},
      {"synthetic-mof-ordering", hmmseg::synthetic_ordering},
      {"grammar-decode-exactness", hmmseg::grammar_exactness},
      {"metric-suite", hmmseg::metric_suite},
      {"posterior-round-trip", hmmseg::posterior_round_trip},
      {"determinism", hmmseg::determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome outcome;
    try {
      outcome = criteria[i].second();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    if (!outcome.pass) ++failures;
    std::printf("%s %zu %s: %s\n", outcome.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, outcome.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
