#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "bitext/corpus.hpp"
#include "bitext/ensemble.hpp"
#include "bitext/margin.hpp"
#include "bitext/prefilter.hpp"
#include "bitext/selector.hpp"

namespace bitext {

/// Everything `run-all` needs. Empty paths mean "not supplied".
struct PipelineConfig {
  using path = std::filesystem::path;

  path src, tgt;
  std::string src_lang, tgt_lang;
  path src_emb, tgt_emb;
  std::size_t dim = 0;

  path clean_src, clean_tgt;
  path clean_src_emb, clean_tgt_emb;

  double overlap_threshold = 0.6;
  bool lid = true;
  path lid_labels_src, lid_labels_tgt;
  double lid_min_confidence = 0.0;
  /// "lang=path" entries used to train the built-in identifier.
  std::vector<std::string> lid_samples;

  /// Any of margin_local, margin_global, xent.
  std::vector<std::string> scorers = {"margin_local"};
  MarginVariant variant = MarginVariant::ratio;
  std::size_t k = 4;
  path xent_forward, xent_backward;
  path clean_xent_forward, clean_xent_backward;
  double log_base = 0.0;
  /// Extra feature columns (TSV with header) for noisy and clean pairs.
  path features_extra, clean_features_extra;

  bool ensemble = false;
  PuOptions pu;
  int iterations = 2;

  /// Column used for selection; defaults to "ensemble" when the ensemble
  /// runs and to the first scorer otherwise.
  std::string final_score;
  std::size_t budget_tokens = 1;
  Side english_side = Side::tgt;

  path out_dir;
  std::size_t threads = 1;
};

struct PipelineResult {
  std::vector<FilterVerdict> verdicts;
  ScoreTable scores;
  std::string final_column;
  Selection selection;
};

/// Builds prefilter options: label files first, then sample-trained or
/// clean-corpus-trained n-gram profiles.
PrefilterOptions make_prefilter_options(const PipelineConfig& config, const PairCorpus* clean);

/// prefilter -> scorers -> optional ensemble -> subsample. Writes into
/// `out_dir`: verdicts.tsv, scores.<column>.txt per column, features.tsv,
/// scores.txt (final column), the selection files and manifest.txt.
PipelineResult run_all(const PipelineConfig& config);

}  // namespace bitext
