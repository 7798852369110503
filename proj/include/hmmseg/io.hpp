// Copyright 2026 The hmmseg Authors
// SPDX-License-Identifier: Apache-2.0

// Plain-text file formats. Every writer emits a canonical form (single
// separators, '\n' line ends) that the matching parser reads back exactly.

#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "hmmseg/corpus.hpp"
#include "hmmseg/error.hpp"
#include "hmmseg/gaussian.hpp"
#include "hmmseg/grammar.hpp"
#include "hmmseg/hmm.hpp"
#include "hmmseg/training.hpp"

namespace hmmseg::io {

namespace fs = std::filesystem;

inline constexpr std::string_view kFeatureExtension = ".feat";
inline constexpr std::string_view kSegmentationExtension = ".seg";
inline constexpr std::string_view kPosteriorExtension = ".post";
inline constexpr std::string_view kAlignmentExtension = ".ali";
inline constexpr std::string_view kStartSymbol = "<s>";
inline constexpr std::string_view kEndSymbol = "</s>";

// ---------------------------------------------------------------------------
// Text primitives

/// Shortest decimal form that parses back to the same double.
inline std::string format_double(double v) {
  if (v == kNegInf) return "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

/// 17 significant digits, for model parameters.
inline std::string format_precise(double v) {
  if (v == kNegInf) return "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, end);
}

inline double parse_double(std::string_view token) {
  double v = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if (!token.empty() && token.front() == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  require(ec == std::errc() && ptr == last && !token.empty(), ErrorCode::invalid_data,
          "not a number: '" + std::string(token) + "'");
  return v;
}

inline long long parse_int(std::string_view token) {
  long long v = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  require(ec == std::errc() && ptr == token.data() + token.size() && !token.empty(), ErrorCode::invalid_data,
          "not an integer: '" + std::string(token) + "'");
  return v;
}

inline std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t begin = 0;
  while (true) {
    const auto pos = text.find(sep, begin);
    if (pos == std::string_view::npos) {
      out.push_back(text.substr(begin));
      return out;
    }
    out.push_back(text.substr(begin, pos - begin));
    begin = pos + 1;
  }
}

/// Whitespace-separated tokens.
inline std::vector<std::string_view> tokens(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

/// Non-empty lines, with a trailing '\r' removed.
inline std::vector<std::string_view> lines(std::string_view text) {
  std::vector<std::string_view> out;
  for (auto line : split(text, '\n')) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!tokens(line).empty()) out.push_back(line);
  }
  return out;
}

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::io, "cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

/// Writes through a temporary file and renames it into place, so readers
/// never observe a partial file.
inline void write_file(const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".partial";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    require(static_cast<bool>(out), ErrorCode::io, "cannot write '" + path.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    require(static_cast<bool>(out), ErrorCode::io, "write failed for '" + path.string() + "'");
  }
  fs::rename(tmp, path);
}

// ---------------------------------------------------------------------------
// Corpus files

/// `T l` header followed by T rows of l values.
inline std::string format_features(const FeatureSequence& seq) {
  std::string out = std::to_string(seq.length()) + " " + std::to_string(seq.dim()) + "\n";
  for (Eigen::Index t = 0; t < seq.frames.rows(); ++t) {
    for (Eigen::Index d = 0; d < seq.frames.cols(); ++d) {
      if (d > 0) out += ' ';
      out += format_double(seq.frames(t, d));
    }
    out += '\n';
  }
  return out;
}

inline FeatureSequence parse_features(std::string_view text, std::string video_id) {
  const auto rows = lines(text);
  require(!rows.empty(), ErrorCode::invalid_data, "feature file for '" + video_id + "' is empty");
  const auto header = tokens(rows[0]);
  require(header.size() == 2, ErrorCode::invalid_data, "feature header must be 'T l'");
  const auto frames = parse_int(header[0]);
  const auto dim = parse_int(header[1]);
  require(frames >= 1 && dim >= 1, ErrorCode::invalid_data, "feature header needs T >= 1 and l >= 1");
  require(static_cast<long long>(rows.size()) == frames + 1, ErrorCode::invalid_data,
          "feature file for '" + video_id + "' declares " + std::to_string(frames) + " frames but has " +
              std::to_string(rows.size() - 1));
  FeatureSequence seq{std::move(video_id), FrameMatrix(frames, dim)};
  for (long long t = 0; t < frames; ++t) {
    const auto values = tokens(rows[static_cast<std::size_t>(t + 1)]);
    require(static_cast<long long>(values.size()) == dim, ErrorCode::invalid_data,
            "frame " + std::to_string(t) + " of '" + seq.video_id + "' has " + std::to_string(values.size()) +
                " values, expected " + std::to_string(dim));
    for (long long d = 0; d < dim; ++d) seq.frames(t, d) = parse_double(values[static_cast<std::size_t>(d)]);
  }
  seq.validate();
  return seq;
}

inline FeatureSequence read_features(const fs::path& path, std::string video_id) {
  return parse_features(read_file(path), std::move(video_id));
}

inline fs::path feature_path(const fs::path& dir, std::string_view video_id) {
  return dir / (std::string(video_id) + std::string(kFeatureExtension));
}

inline std::string format_labels(const LabelSpace& labels) {
  std::string out;
  for (const auto& name : labels.names()) out += name + "\n";
  return out;
}

inline LabelSpace parse_labels(std::string_view text) {
  std::vector<std::string> names;
  for (auto line : lines(text)) {
    const auto t = tokens(line);
    require(t.size() == 1, ErrorCode::invalid_data, "label names must be single tokens");
    names.emplace_back(t[0]);
  }
  require(!names.empty(), ErrorCode::invalid_data, "label file is empty");
  return LabelSpace(std::move(names));
}

/// `video_id <TAB> label1 label2 ... [<TAB> @activity]`
inline std::string format_transcripts(std::span<const Transcript> transcripts, const LabelSpace& labels) {
  std::string out;
  for (const auto& tr : transcripts) {
    out += tr.video_id + "\t";
    for (std::size_t i = 0; i < tr.actions.size(); ++i) {
      if (i > 0) out += ' ';
      out += labels.name(tr.actions[i]);
    }
    if (tr.activity_tag) out += "\t@" + *tr.activity_tag;
    out += '\n';
  }
  return out;
}

inline std::vector<Transcript> parse_transcripts(std::string_view text, const LabelSpace& labels) {
  std::vector<Transcript> out;
  for (auto line : lines(text)) {
    const auto fields = split(line, '\t');
    require(fields.size() == 2 || fields.size() == 3, ErrorCode::invalid_data,
            "transcript line must be 'video_id<TAB>labels[<TAB>@activity]'");
    const auto id = tokens(fields[0]);
    require(id.size() == 1, ErrorCode::invalid_data, "bad video id in transcript line");
    Transcript tr{std::string(id[0]), {}, std::nullopt};
    for (auto name : tokens(fields[1])) tr.actions.push_back(labels.id(name));
    require(!tr.actions.empty(), ErrorCode::invalid_data, "transcript of '" + tr.video_id + "' is empty");
    if (fields.size() == 3) {
      const auto tag = tokens(fields[2]);
      require(tag.size() == 1 && tag[0].size() > 1 && tag[0].front() == '@', ErrorCode::invalid_data,
              "activity tag must look like '@name'");
      tr.activity_tag = std::string(tag[0].substr(1));
    }
    out.push_back(std::move(tr));
  }
  return out;
}

/// `video_id <TAB> label_per_frame...`
inline std::string format_labelings(std::span<const FrameLabeling> labelings, const LabelSpace& labels) {
  std::string out;
  for (const auto& fl : labelings) {
    out += fl.video_id + "\t";
    for (std::size_t t = 0; t < fl.labels.size(); ++t) {
      if (t > 0) out += ' ';
      out += labels.name(fl.labels[t]);
    }
    out += '\n';
  }
  return out;
}

inline std::vector<FrameLabeling> parse_labelings(std::string_view text, const LabelSpace& labels) {
  std::vector<FrameLabeling> out;
  for (auto line : lines(text)) {
    const auto fields = split(line, '\t');
    require(fields.size() == 2, ErrorCode::invalid_data, "labeling line must be 'video_id<TAB>labels'");
    const auto id = tokens(fields[0]);
    require(id.size() == 1, ErrorCode::invalid_data, "bad video id in labeling line");
    FrameLabeling fl{std::string(id[0]), {}};
    for (auto name : tokens(fields[1])) fl.labels.push_back(labels.id(name));
    require(!fl.labels.empty(), ErrorCode::invalid_data, "labeling of '" + fl.video_id + "' is empty");
    out.push_back(std::move(fl));
  }
  return out;
}

/// `start_frame end_frame label` per line.
inline std::string format_segmentation(const Segmentation& seg, const LabelSpace& labels) {
  std::string out;
  for (const auto& s : seg.segments) {
    out += std::to_string(s.start_frame) + " " + std::to_string(s.end_frame) + " " + labels.name(s.label) + "\n";
  }
  return out;
}

inline Segmentation parse_segmentation(std::string_view text, const LabelSpace& labels) {
  Segmentation seg;
  for (auto line : lines(text)) {
    const auto t = tokens(line);
    require(t.size() == 3, ErrorCode::invalid_data, "segment line must be 'start end label'");
    seg.segments.push_back({labels.id(t[2]), static_cast<int>(parse_int(t[0])), static_cast<int>(parse_int(t[1]))});
  }
  seg.validate();
  return seg;
}

/// One line per frame: `t global_state action_label instance_ordinal local_state`.
inline std::string format_alignment(const StateAlignment& alignment, const StateIndex& index, const LabelSpace& labels) {
  std::string out;
  for (int t = 0; t < alignment.length(); ++t) {
    const int s = alignment.states[static_cast<std::size_t>(t)];
    const StateKey& key = index.key(s);
    out += std::to_string(t) + " " + std::to_string(s) + " " + labels.name(key.label) + " " +
           std::to_string(key.instance) + " " + std::to_string(key.local) + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Observation-model files

/// `T S` header then T rows of S probabilities; rows must sum to 1 +- 1e-3.
inline PosteriorMatrix parse_posteriors(std::string_view text) {
  const auto rows = lines(text);
  require(!rows.empty(), ErrorCode::invalid_data, "posterior file is empty");
  const auto header = tokens(rows[0]);
  require(header.size() == 2, ErrorCode::invalid_data, "posterior header must be 'T S'");
  const auto frames = parse_int(header[0]);
  const auto states = parse_int(header[1]);
  require(frames >= 1 && states >= 1 && static_cast<long long>(rows.size()) == frames + 1, ErrorCode::invalid_data,
          "posterior file does not match its header");
  Matrix m(frames, states);
  for (long long t = 0; t < frames; ++t) {
    const auto values = tokens(rows[static_cast<std::size_t>(t + 1)]);
    require(static_cast<long long>(values.size()) == states, ErrorCode::invalid_data, "posterior row has wrong width");
    for (long long s = 0; s < states; ++s) m(t, s) = parse_double(values[static_cast<std::size_t>(s)]);
  }
  return PosteriorMatrix(std::move(m), 1e-3);
}

inline std::string format_posteriors(const Matrix& posteriors) {
  std::string out = std::to_string(posteriors.rows()) + " " + std::to_string(posteriors.cols()) + "\n";
  for (Eigen::Index t = 0; t < posteriors.rows(); ++t) {
    for (Eigen::Index s = 0; s < posteriors.cols(); ++s) {
      if (s > 0) out += ' ';
      out += format_double(posteriors(t, s));
    }
    out += '\n';
  }
  return out;
}

/// State count, then one prior per line in emission-id order.
inline std::string format_priors(const PriorTable& priors) {
  std::string out = std::to_string(priors.size()) + "\n";
  for (double p : priors.values()) out += format_precise(p) + "\n";
  return out;
}

inline PriorTable parse_priors(std::string_view text) {
  const auto rows = lines(text);
  require(!rows.empty(), ErrorCode::invalid_data, "prior file is empty");
  const auto count = parse_int(tokens(rows[0]).at(0));
  require(static_cast<long long>(rows.size()) == count + 1, ErrorCode::invalid_data, "prior file does not match its header");
  std::vector<double> values;
  for (long long s = 0; s < count; ++s) values.push_back(parse_double(tokens(rows[static_cast<std::size_t>(s + 1)]).at(0)));
  return PriorTable(std::move(values));
}

// ---------------------------------------------------------------------------
// Model directory: labels.txt, topology.txt, model.txt

/// Header records (dim, states, covariance, floor), then per emission:
/// `state id label local`, `mean ...`, and the covariance (l rows for full,
/// one `var ...` row for diagonal).
inline std::string format_model(const ModelSet& models) {
  std::string out = "dim " + std::to_string(models.dim()) + "\n";
  out += "states " + std::to_string(models.emissions.size()) + "\n";
  out += "covariance " + std::string(to_string(models.covariance)) + "\n";
  out += "floor " + format_precise(models.variance_floor) + "\n";
  for (std::size_t e = 0; e < models.emissions.size(); ++e) {
    const auto [label, local] = models.topology.emission_owner(static_cast<int>(e));
    const GaussianModel& g = models.emissions[e];
    out += "state " + std::to_string(e) + " " + models.labels.name(label) + " " + std::to_string(local) + "\n";
    out += "mean";
    for (Eigen::Index d = 0; d < g.mean().size(); ++d) out += " " + format_precise(g.mean()(d));
    out += "\n";
    if (models.covariance == CovarianceMode::diagonal) {
      out += "var";
      for (Eigen::Index d = 0; d < g.mean().size(); ++d) out += " " + format_precise(g.covariance()(d, d));
      out += "\n";
    } else {
      for (Eigen::Index r = 0; r < g.covariance().rows(); ++r) {
        out += "cov";
        for (Eigen::Index c = 0; c < g.covariance().cols(); ++c) out += " " + format_precise(g.covariance()(r, c));
        out += "\n";
      }
    }
  }
  return out;
}

/// `frames_per_state N` then `label n_states` per modeled label.
inline std::string format_topology(const ModelSet& models) {
  std::string out = "frames_per_state " + std::to_string(models.frames_per_state) + "\n";
  for (LabelId label = 0; label < models.topology.num_labels(); ++label) {
    if (!models.topology.has_model(label)) continue;
    out += models.labels.name(label) + " " + std::to_string(models.topology.model(label).num_states()) + "\n";
  }
  return out;
}

inline ModelSet parse_model_files(std::string_view labels_text, std::string_view topology_text,
                                  std::string_view model_text) {
  ModelSet models;
  models.labels = parse_labels(labels_text);

  const auto topo = lines(topology_text);
  require(!topo.empty(), ErrorCode::invalid_data, "topology file is empty");
  const auto fps_line = tokens(topo[0]);
  require(fps_line.size() == 2 && fps_line[0] == "frames_per_state", ErrorCode::invalid_data,
          "topology must start with 'frames_per_state N'");
  models.frames_per_state = static_cast<int>(parse_int(fps_line[1]));
  std::vector<std::optional<ActionModel>> actions(static_cast<std::size_t>(models.labels.size()));
  for (std::size_t i = 1; i < topo.size(); ++i) {
    const auto t = tokens(topo[i]);
    require(t.size() == 2, ErrorCode::invalid_data, "topology line must be 'label n_states'");
    const LabelId label = models.labels.id(t[0]);
    actions[static_cast<std::size_t>(label)] =
        build_action_model(label, static_cast<int>(parse_int(t[1])), models.frames_per_state);
  }
  models.topology = ModelTopology(std::move(actions));

  const auto rows = lines(model_text);
  std::size_t r = 0;
  auto next = [&](std::string_view key) {
    require(r < rows.size(), ErrorCode::invalid_data, "model file ends early");
    auto t = tokens(rows[r++]);
    require(!t.empty() && t[0] == key, ErrorCode::invalid_data, "model file: expected '" + std::string(key) + "'");
    return t;
  };
  const auto dim = parse_int(next("dim").at(1));
  const auto states = parse_int(next("states").at(1));
  models.covariance = parse_covariance_mode(next("covariance").at(1));
  models.variance_floor = parse_double(next("floor").at(1));
  require(states == models.topology.num_emissions(), ErrorCode::invalid_data,
          "model file and topology disagree on the number of states");
  for (long long e = 0; e < states; ++e) {
    const auto head = next("state");
    require(head.size() == 4 && parse_int(head[1]) == e, ErrorCode::invalid_data, "model states out of order");
    const auto [label, local] = models.topology.emission_owner(static_cast<int>(e));
    require(models.labels.id(head[2]) == label && parse_int(head[3]) == local, ErrorCode::invalid_data,
            "model state " + std::to_string(e) + " does not match the topology");
    const auto mean_row = next("mean");
    require(static_cast<long long>(mean_row.size()) == dim + 1, ErrorCode::invalid_data, "mean has wrong dimension");
    Vector mean(dim);
    for (long long d = 0; d < dim; ++d) mean(d) = parse_double(mean_row[static_cast<std::size_t>(d + 1)]);
    Matrix cov = Matrix::Zero(dim, dim);
    if (models.covariance == CovarianceMode::diagonal) {
      const auto var_row = next("var");
      require(static_cast<long long>(var_row.size()) == dim + 1, ErrorCode::invalid_data, "variance has wrong dimension");
      for (long long d = 0; d < dim; ++d) cov(d, d) = parse_double(var_row[static_cast<std::size_t>(d + 1)]);
    } else {
      for (long long i = 0; i < dim; ++i) {
        const auto cov_row = next("cov");
        require(static_cast<long long>(cov_row.size()) == dim + 1, ErrorCode::invalid_data, "covariance row has wrong width");
        for (long long j = 0; j < dim; ++j) cov(i, j) = parse_double(cov_row[static_cast<std::size_t>(j + 1)]);
      }
    }
    models.emissions.emplace_back(std::move(mean), std::move(cov), models.covariance);
  }
  require(r == rows.size(), ErrorCode::invalid_data, "trailing records in model file");
  return models;
}

inline void save_models(const ModelSet& models, const fs::path& dir) {
  write_file(dir / "labels.txt", format_labels(models.labels));
  write_file(dir / "topology.txt", format_topology(models));
  write_file(dir / "model.txt", format_model(models));
}

inline ModelSet load_models(const fs::path& dir) {
  return parse_model_files(read_file(dir / "labels.txt"), read_file(dir / "topology.txt"),
                           read_file(dir / "model.txt"));
}

// ---------------------------------------------------------------------------
// Grammar files

/// `count <TAB> label1 label2 ... [<TAB> @activity]`
inline std::string format_path_grammar(const PathGrammar& grammar, const LabelSpace& labels) {
  std::string out;
  for (const auto& path : grammar.paths) {
    out += std::to_string(path.count) + "\t";
    for (std::size_t i = 0; i < path.labels.size(); ++i) {
      if (i > 0) out += ' ';
      out += labels.name(path.labels[i]);
    }
    if (path.activity) out += "\t@" + *path.activity;
    out += '\n';
  }
  return out;
}

inline PathGrammar parse_path_grammar(std::string_view text, const LabelSpace& labels) {
  PathGrammar grammar;
  for (auto line : lines(text)) {
    const auto fields = split(line, '\t');
    require(fields.size() == 2 || fields.size() == 3, ErrorCode::invalid_data,
            "grammar line must be 'count<TAB>labels[<TAB>@activity]'");
    GrammarPath path;
    path.count = static_cast<int>(parse_int(tokens(fields[0]).at(0)));
    require(path.count >= 1, ErrorCode::invalid_data, "grammar path count must be >= 1");
    for (auto name : tokens(fields[1])) path.labels.push_back(labels.id(name));
    require(!path.labels.empty(), ErrorCode::invalid_data, "empty grammar path");
    if (fields.size() == 3) {
      const auto tag = tokens(fields[2]);
      require(tag.size() == 1 && tag[0].size() > 1 && tag[0].front() == '@', ErrorCode::invalid_data,
              "activity tag must look like '@name'");
      path.activity = std::string(tag[0].substr(1));
    }
    grammar.paths.push_back(std::move(path));
  }
  require(!grammar.paths.empty(), ErrorCode::invalid_data, "grammar file is empty");
  return grammar;
}

/// `label_a label_b logprob` for every pair, with `<s>` as the start row and
/// `</s>` as the end column.
inline std::string format_bigram(const BigramModel& bigram, const LabelSpace& labels) {
  auto name = [&](int symbol, std::string_view boundary) {
    return symbol == bigram.num_labels() ? std::string(boundary) : labels.name(symbol);
  };
  std::string out;
  for (int from = 0; from <= bigram.num_labels(); ++from) {
    const int row = from == 0 ? bigram.start_symbol() : from - 1;  // start row first
    for (int to = 0; to <= bigram.num_labels(); ++to) {
      out += name(row, kStartSymbol) + " " + name(to, kEndSymbol) + " " + format_precise(bigram.log_prob(row, to)) + "\n";
    }
  }
  return out;
}

inline BigramModel parse_bigram(std::string_view text, const LabelSpace& labels) {
  const int n = labels.size();
  Matrix table = Matrix::Constant(n + 1, n + 1, kNegInf);
  for (auto line : lines(text)) {
    const auto t = tokens(line);
    require(t.size() == 3, ErrorCode::invalid_data, "bigram line must be 'label_a label_b logprob'");
    const int from = t[0] == kStartSymbol ? n : labels.id(t[0]);
    const int to = t[1] == kEndSymbol ? n : labels.id(t[1]);
    table(from, to) = parse_double(t[2]);
  }
  return BigramModel(n, std::move(table));
}

/// Recognized transcripts reuse the transcript format.
inline std::string format_recognized(std::span<const std::string> video_ids, std::span<const DecodeResult> results,
                                     const LabelSpace& labels) {
  std::vector<Transcript> transcripts;
  for (std::size_t i = 0; i < results.size(); ++i) {
    transcripts.push_back({video_ids[i], results[i].transcript, results[i].activity});
  }
  return format_transcripts(transcripts, labels);
}

// ---------------------------------------------------------------------------
// Corpus loading

/// Loads `<dir>/<video_id>.feat` for every transcript, in transcript order.
inline TrainingCorpus load_corpus(const fs::path& feature_dir, const fs::path& transcript_file, LabelSpace labels) {
  TrainingCorpus corpus;
  corpus.transcripts = parse_transcripts(read_file(transcript_file), labels);
  corpus.labels = std::move(labels);
  for (const auto& tr : corpus.transcripts) corpus.videos.push_back(read_features(feature_path(feature_dir, tr.video_id), tr.video_id));
  corpus.validate();
  return corpus;
}

/// Video ids of all feature files in a directory, sorted.
inline std::vector<std::string> list_feature_ids(const fs::path& dir) {
  require(fs::is_directory(dir), ErrorCode::io, "'" + dir.string() + "' is not a directory");
  std::vector<std::string> ids;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == kFeatureExtension) {
      ids.push_back(entry.path().stem().string());
    }
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

}  // namespace hmmseg::io
