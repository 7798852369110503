// Copyright 2026 The hmmseg Authors
// SPDX-License-Identifier: Apache-2.0

#include "cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hmmseg/hmmseg.hpp"

namespace hmmseg::cli {
namespace {

namespace fs = std::filesystem;

struct PosteriorFlags {
  std::string dir;
  std::string priors;
  std::string combine = "ext";

  bool active() const { return !dir.empty(); }
};

void add_posterior_flags(CLI::App* cmd, PosteriorFlags& flags) {
  auto* dir = cmd->add_option("--ext-posteriors", flags.dir, "directory of <video_id>.post classifier posteriors");
  cmd->add_option("--priors", flags.priors, "state prior file (default: <models>/priors.txt)")->needs(dir);
  cmd->add_option("--combine", flags.combine, "use external scores alone or averaged with the Gaussians")
      ->check(CLI::IsMember({"ext", "mean"}))
      ->needs(dir);
}

/// Scores a video with the Gaussians, external posteriors, or their mean.
class Scorer {
 public:
  Scorer(const ModelSet& models, const PosteriorFlags& flags, const fs::path& model_dir) : flags_(flags) {
    if (!flags_.active()) return;
    const fs::path prior_file = flags_.priors.empty() ? model_dir / "priors.txt" : fs::path(flags_.priors);
    priors_ = io::parse_priors(io::read_file(prior_file));
    require(priors_.size() == models.topology.num_emissions(), ErrorCode::invalid_data,
            "prior file has " + std::to_string(priors_.size()) + " states but the models have " +
                std::to_string(models.topology.num_emissions()));
  }

  ScoreMatrix operator()(const ModelSet& models, const FeatureSequence& video) const {
    if (!flags_.active()) return models.score(video);
    const PosteriorMatrix posteriors =
        io::parse_posteriors(io::read_file(fs::path(flags_.dir) / (video.video_id + std::string(io::kPosteriorExtension))));
    require(posteriors.rows().rows() == video.length(), ErrorCode::invalid_data,
            "posteriors of '" + video.video_id + "' have " + std::to_string(posteriors.rows().rows()) +
                " frames, features have " + std::to_string(video.length()));
    ScoreMatrix external = posterior_to_loglikelihood(posteriors, priors_);
    if (flags_.combine == "mean") return combine_scores(models.score(video), external);
    return external;
  }

 private:
  PosteriorFlags flags_;
  PriorTable priors_;
};

/// Ground truth reordered to match the corpus.
std::vector<FrameLabeling> match_ground_truth(const std::vector<FrameLabeling>& gt, const TrainingCorpus& corpus) {
  std::map<std::string, const FrameLabeling*> by_id;
  for (const auto& fl : gt) by_id[fl.video_id] = &fl;
  std::vector<FrameLabeling> out;
  for (const auto& video : corpus.videos) {
    auto it = by_id.find(video.video_id);
    require(it != by_id.end(), ErrorCode::invalid_data, "no ground truth for '" + video.video_id + "'");
    require(it->second->length() == video.length(), ErrorCode::invalid_data,
            "ground truth of '" + video.video_id + "' has the wrong length");
    out.push_back(*it->second);
  }
  return out;
}

// ---------------------------------------------------------------------------

struct TrainArgs {
  std::string features, transcripts, labels, out, gt;
  int iterations = 3;
  int frames_per_state = 10;
  std::string covariance = "full";
  std::string update = "soft";
  std::string state_rule = "corpus";
  double floor = kDefaultVarianceFloor;
  double bigram_smoothing = 0.0;
  int jobs = 1;
};

int run_train(const TrainArgs& args, std::ostream& out, std::ostream& err) {
  const LabelSpace labels = io::parse_labels(io::read_file(args.labels));
  const TrainingCorpus corpus = io::load_corpus(args.features, args.transcripts, labels);
  TrainConfig config;
  config.iterations = args.iterations;
  config.frames_per_state = args.frames_per_state;
  config.covariance = parse_covariance_mode(args.covariance);
  config.update = args.update == "hard" ? UpdateMode::hard : UpdateMode::soft;
  config.state_rule = args.state_rule == "class" ? StateCountRule::per_class : StateCountRule::corpus_mean;
  config.variance_floor = args.floor;
  config.jobs = args.jobs;

  std::optional<std::vector<FrameLabeling>> gt;
  if (!args.gt.empty()) gt = match_ground_truth(io::parse_labelings(io::read_file(args.gt), labels), corpus);

  const TrainResult result = train(corpus, config);
  const fs::path dir = args.out;
  io::save_models(result.models, dir);

  std::string log;
  for (const auto& id : result.models.skipped) log += "skipped " + id + " infeasible\n";
  for (const auto& w : result.models.warnings) log += "warning " + w + "\n";
  for (const auto& report : result.history) {
    const fs::path ali_dir = dir / "alignments" / ("iter_" + std::to_string(report.iteration));
    std::vector<FrameLabeling> hyp, ref;
    for (std::size_t v = 0; v < corpus.size(); ++v) {
      if (!report.alignments[v]) continue;
      const auto& id = corpus.videos[v].video_id;
      io::write_file(ali_dir / (id + std::string(io::kAlignmentExtension)),
                     io::format_alignment(*report.alignments[v], *report.indices[v], labels));
      if (gt) {
        FrameLabeling fl = labeling_from_segmentation(segmentation_from_alignment(*report.alignments[v], *report.indices[v]));
        fl.video_id = id;
        hyp.push_back(std::move(fl));
        ref.push_back((*gt)[v]);
      }
    }
    log += "iteration " + std::to_string(report.iteration) + " log_likelihood " +
           io::format_precise(report.log_likelihood);
    if (gt) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.4f", mof(ref, hyp));
      log += std::string(" mof ") + buf;
    }
    log += "\n";
  }
  io::write_file(dir / "train.log", log);

  std::vector<std::vector<int>> paths;
  const auto& final_report = result.history.back();
  for (std::size_t v = 0; v < corpus.size(); ++v) {
    if (final_report.alignments[v]) {
      paths.push_back(emission_path(*final_report.alignments[v], *final_report.indices[v], result.models.topology));
    }
  }
  io::write_file(dir / "priors.txt",
                 io::format_priors(estimate_priors(paths, result.models.topology.num_emissions())));
  io::write_file(dir / "grammar.txt", io::format_path_grammar(build_path_grammar(corpus.transcripts), labels));
  io::write_file(dir / "bigram.txt",
                 io::format_bigram(build_bigram(corpus.transcripts, labels.size(), args.bigram_smoothing), labels));

  for (const auto& id : result.models.skipped) err << "hmmseg: skipped infeasible video " << id << "\n";
  out << "trained " << result.models.topology.num_emissions() << " states over "
      << corpus.size() - result.models.skipped.size() << " videos, " << config.iterations << " iterations\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct AlignArgs {
  std::string models, features, transcripts, out;
  PosteriorFlags posteriors;
  bool shrink = false;
  int jobs = 1;
};

int run_align(const AlignArgs& args, std::ostream& out, std::ostream& err) {
  const ModelSet models = io::load_models(args.models);
  const TrainingCorpus corpus = io::load_corpus(args.features, args.transcripts, models.labels);
  const Scorer scorer(models, args.posteriors, args.models);
  AlignOptions options;
  options.jobs = args.jobs;
  options.shrink_infeasible = args.shrink;
  options.scorer = [&](const ModelSet& m, const FeatureSequence& video, std::size_t) { return scorer(m, video); };
  const CorpusAlignment aligned = align_corpus(models, corpus, options);

  fs::create_directories(args.out);
  for (std::size_t v = 0; v < corpus.size(); ++v) {
    if (!aligned.videos[v]) continue;
    io::write_file(fs::path(args.out) / (corpus.videos[v].video_id + std::string(io::kSegmentationExtension)),
                   io::format_segmentation(aligned.videos[v]->segmentation, models.labels));
  }
  for (const auto& id : aligned.skipped) err << "hmmseg: skipped infeasible video " << id << "\n";
  out << "aligned " << corpus.size() - aligned.skipped.size() << " of " << corpus.size() << " videos\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct SegmentArgs {
  std::string models, features, grammar, out;
  PosteriorFlags posteriors;
  bool path_prior = false;
  int jobs = 1;
};

int run_segment(const SegmentArgs& args, std::ostream& out, std::ostream&) {
  const ModelSet models = io::load_models(args.models);
  const Scorer scorer(models, args.posteriors, args.models);
  const auto colon = args.grammar.find(':');
  require(colon != std::string::npos, ErrorCode::invalid_argument, "--grammar must be path:FILE or bigram:FILE");
  const std::string kind = args.grammar.substr(0, colon);
  const std::string file = args.grammar.substr(colon + 1);
  require(kind == "path" || kind == "bigram", ErrorCode::invalid_argument, "--grammar must be path:FILE or bigram:FILE");
  std::optional<PathGrammar> paths;
  std::optional<BigramModel> bigram;
  if (kind == "path") {
    paths = io::parse_path_grammar(io::read_file(file), models.labels);
  } else {
    bigram = io::parse_bigram(io::read_file(file), models.labels);
  }

  const auto ids = io::list_feature_ids(args.features);
  require(!ids.empty(), ErrorCode::invalid_data, "no feature files in '" + args.features + "'");
  std::vector<DecodeResult> results(ids.size());
  DecodeOptions options;
  options.path_prior = args.path_prior;
  parallel_for(ids.size(), args.jobs, [&](std::size_t v) {
    const FeatureSequence video = io::read_features(io::feature_path(args.features, ids[v]), ids[v]);
    const ScoreMatrix scores = scorer(models, video);
    results[v] = paths ? decode(models.topology, *paths, scores, options) : decode(models.topology, *bigram, scores);
  });

  fs::create_directories(args.out);
  for (std::size_t v = 0; v < ids.size(); ++v) {
    io::write_file(fs::path(args.out) / (ids[v] + std::string(io::kSegmentationExtension)),
                   io::format_segmentation(results[v].segmentation, models.labels));
  }
  io::write_file(fs::path(args.out) / "recognized.txt", io::format_recognized(ids, results, models.labels));
  out << "segmented " << ids.size() << " videos\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct EvalArgs {
  std::string gt, hyp, activities;
  bool per_class = false;
  std::string format = "text";
};

/// Activity tag per video id from transcript-style lines (`id<TAB>...<TAB>@tag`).
std::map<std::string, std::string> read_activity_tags(const fs::path& file) {
  std::map<std::string, std::string> tags;
  if (!fs::exists(file)) return tags;
  for (auto line : io::lines(io::read_file(file))) {
    const auto fields = io::split(line, '\t');
    const auto id = io::tokens(fields.front());
    if (id.size() != 1 || fields.size() < 2) continue;
    const auto last = io::tokens(fields.back());
    if (last.size() == 1 && last[0].size() > 1 && last[0].front() == '@') {
      tags[std::string(id[0])] = std::string(last[0].substr(1));
    }
  }
  return tags;
}

int run_eval(const EvalArgs& args, std::ostream& out, std::ostream& err) {
  // Label names come from the files themselves; metrics do not depend on ids.
  const std::string gt_text = io::read_file(args.gt);
  std::vector<std::string> names;
  std::map<std::string, bool> seen;
  auto note = [&](std::string_view name) {
    if (seen.emplace(std::string(name), true).second) names.emplace_back(name);
  };
  std::vector<std::pair<std::string, std::string>> hyp_texts;
  for (auto line : io::lines(gt_text)) {
    const auto fields = io::split(line, '\t');
    require(fields.size() == 2, ErrorCode::invalid_data, "labeling line must be 'video_id<TAB>labels'");
    for (auto name : io::tokens(fields[1])) note(name);
    const std::string id(io::tokens(fields[0]).at(0));
    const fs::path seg = fs::path(args.hyp) / (id + std::string(io::kSegmentationExtension));
    if (fs::exists(seg)) {
      hyp_texts.emplace_back(id, io::read_file(seg));
      for (auto seg_line : io::lines(hyp_texts.back().second)) {
        const auto t = io::tokens(seg_line);
        if (t.size() == 3) note(t[2]);
      }
    }
  }
  std::sort(names.begin(), names.end());
  const LabelSpace labels(names);
  const auto gt_all = io::parse_labelings(gt_text, labels);
  std::map<std::string, std::string> hyp_by_id(hyp_texts.begin(), hyp_texts.end());

  std::vector<FrameLabeling> gt, hyp;
  int skipped = 0;
  for (const auto& fl : gt_all) {
    auto it = hyp_by_id.find(fl.video_id);
    if (it == hyp_by_id.end()) {
      ++skipped;
      continue;
    }
    FrameLabeling h = labeling_from_segmentation(io::parse_segmentation(it->second, labels));
    h.video_id = fl.video_id;
    gt.push_back(fl);
    hyp.push_back(std::move(h));
  }
  require(!gt.empty(), ErrorCode::invalid_data, "no hypothesis segmentations found in '" + args.hyp + "'");
  EvalReport report = evaluate(gt, hyp);
  report.skipped = skipped;

  if (!args.activities.empty()) {
    const auto gt_tags = read_activity_tags(args.activities);
    const auto hyp_tags = read_activity_tags(fs::path(args.hyp) / "recognized.txt");
    std::vector<std::optional<std::string>> ref, got;
    for (const auto& fl : gt) {
      auto g = gt_tags.find(fl.video_id);
      auto h = hyp_tags.find(fl.video_id);
      ref.push_back(g == gt_tags.end() ? std::nullopt : std::optional<std::string>(g->second));
      got.push_back(h == hyp_tags.end() ? std::nullopt : std::optional<std::string>(h->second));
    }
    report.activity_accuracy = activity_accuracy(ref, got);
  }

  auto fixed = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return std::string(buf);
  };
  if (args.format == "kv") {
    out << "mof=" << fixed(report.mof) << "\n"
        << "moc=" << fixed(report.moc) << "\n"
        << "jacc_iou=" << fixed(report.jacc_iou) << "\n"
        << "jacc_iod=" << fixed(report.jacc_iod) << "\n";
    if (report.activity_accuracy) out << "activity=" << fixed(*report.activity_accuracy) << "\n";
    out << "evaluated=" << report.evaluated << "\n"
        << "skipped=" << report.skipped << "\n";
  } else {
    out << "MoF MoC Jacc(IoU) Jacc(IoD)" << (report.activity_accuracy ? " Activity" : "") << "\n";
    out << fixed(report.mof) << " " << fixed(report.moc) << " " << fixed(report.jacc_iou) << " "
        << fixed(report.jacc_iod);
    if (report.activity_accuracy) out << " " << fixed(*report.activity_accuracy);
    out << "\n";
  }
  if (args.per_class) {
    out << "class gt_frames hyp_frames accuracy iou iod\n";
    for (const auto& c : report.per_class) {
      out << labels.name(c.label) << " " << c.gt_frames << " " << c.hyp_frames << " "
          << (c.gt_frames ? fixed(double(c.overlap) / c.gt_frames) : "-") << " "
          << fixed(double(c.overlap) / c.union_frames()) << " "
          << (c.hyp_frames ? fixed(double(c.overlap) / c.hyp_frames) : "-") << "\n";
    }
  }
  if (skipped > 0) err << "hmmseg: " << skipped << " videos without hypothesis were skipped\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct SynthArgs {
  std::string spec, out;
  std::optional<std::uint64_t> seed;
};

int run_synth(const SynthArgs& args, std::ostream& out) {
  SynthSpec spec = args.spec.empty() ? SynthSpec{} : parse_synth_spec(io::read_file(args.spec));
  if (args.seed) spec.seed = *args.seed;
  const SynthData data = synth_generate(spec);
  write_synth(data, args.out);
  out << "wrote " << data.train.corpus.size() << " training and " << data.test.corpus.size()
      << " test videos to " << args.out << "\n";
  return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Weakly supervised temporal action alignment and segmentation with HMMs", "hmmseg"};
  app.require_subcommand(1);

  TrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "learn action models from features and transcripts");
  train_cmd->add_option("--features", train_args.features, "directory of <video_id>.feat files")->required();
  train_cmd->add_option("--transcripts", train_args.transcripts, "transcript file")->required();
  train_cmd->add_option("--labels", train_args.labels, "label-space file")->required();
  train_cmd->add_option("--out", train_args.out, "model output directory")->required();
  train_cmd->add_option("--iters", train_args.iterations, "reestimation iterations")->check(CLI::NonNegativeNumber);
  train_cmd->add_option("--fps-state", train_args.frames_per_state, "average frames per HMM state")
      ->check(CLI::PositiveNumber);
  train_cmd->add_option("--cov", train_args.covariance, "covariance mode")->check(CLI::IsMember({"full", "diag"}));
  train_cmd->add_option("--update", train_args.update, "reestimation weights")->check(CLI::IsMember({"soft", "hard"}));
  train_cmd->add_option("--state-rule", train_args.state_rule, "state count from the corpus mean or per class")
      ->check(CLI::IsMember({"corpus", "class"}));
  train_cmd->add_option("--floor", train_args.floor, "variance floor")->check(CLI::NonNegativeNumber);
  train_cmd->add_option("--bigram-smoothing", train_args.bigram_smoothing, "add-k smoothing of bigram.txt")
      ->check(CLI::NonNegativeNumber);
  train_cmd->add_option("--gt", train_args.gt, "ground-truth labelings for MoF in the training log");
  train_cmd->add_option("--jobs", train_args.jobs, "worker threads")->check(CLI::PositiveNumber);

  AlignArgs align_args;
  auto* align_cmd = app.add_subcommand("align", "align transcripts to videos");
  align_cmd->add_option("--models", align_args.models, "model directory")->required();
  align_cmd->add_option("--features", align_args.features, "directory of <video_id>.feat files")->required();
  align_cmd->add_option("--transcripts", align_args.transcripts, "transcript file")->required();
  align_cmd->add_option("--out", align_args.out, "segmentation output directory")->required();
  align_cmd->add_flag("--shrink-infeasible", align_args.shrink, "use fewer states for videos that are too short");
  align_cmd->add_option("--jobs", align_args.jobs, "worker threads")->check(CLI::PositiveNumber);
  add_posterior_flags(align_cmd, align_args.posteriors);

  SegmentArgs segment_args;
  auto* segment_cmd = app.add_subcommand("segment", "segment and label videos under a grammar");
  segment_cmd->add_option("--models", segment_args.models, "model directory")->required();
  segment_cmd->add_option("--features", segment_args.features, "directory of <video_id>.feat files")->required();
  segment_cmd->add_option("--grammar", segment_args.grammar, "path:FILE or bigram:FILE")->required();
  segment_cmd->add_option("--out", segment_args.out, "output directory")->required();
  segment_cmd->add_flag("--path-prior", segment_args.path_prior, "score grammar paths by their training frequency");
  segment_cmd->add_option("--jobs", segment_args.jobs, "worker threads")->check(CLI::PositiveNumber);
  add_posterior_flags(segment_cmd, segment_args.posteriors);

  EvalArgs eval_args;
  auto* eval_cmd = app.add_subcommand("eval", "score segmentations against ground truth");
  eval_cmd->add_option("--gt", eval_args.gt, "ground-truth labeling file")->required();
  eval_cmd->add_option("--hyp", eval_args.hyp, "directory of <video_id>.seg files")->required();
  eval_cmd->add_option("--activities", eval_args.activities, "ground-truth activity tags (transcript format)");
  eval_cmd->add_flag("--per-class", eval_args.per_class, "print a per-class table");
  eval_cmd->add_option("--format", eval_args.format, "report format")->check(CLI::IsMember({"text", "kv"}));

  SynthArgs synth_args;
  auto* synth_cmd = app.add_subcommand("synth", "write a synthetic corpus from planted models");
  synth_cmd->add_option("--spec", synth_args.spec, "synth spec file (key = value lines)");
  synth_cmd->add_option("--out", synth_args.out, "output directory")->required();
  synth_cmd->add_option("--seed", synth_args.seed, "override the spec seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "hmmseg: error: " << e.what() << "\n";
    return kUsageError;
  }

  try {
    if (train_cmd->parsed()) return run_train(train_args, out, err);
    if (align_cmd->parsed()) return run_align(align_args, out, err);
    if (segment_cmd->parsed()) return run_segment(segment_args, out, err);
    if (eval_cmd->parsed()) return run_eval(eval_args, out, err);
    if (synth_cmd->parsed()) return run_synth(synth_args, out);
  } catch (const Error& e) {
    err << "hmmseg: " << e.what() << "\n";
    return kDataError;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "hmmseg: i/o error: " << e.what() << "\n";
    return kDataError;
  }
  return kUsageError;
}

}  // namespace hmmseg::cli
