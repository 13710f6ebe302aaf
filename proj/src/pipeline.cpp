#include "bitext/pipeline.hpp"

#include <algorithm>
#include <map>
#include <optional>

#include "bitext/embedding.hpp"
#include "bitext/error.hpp"
#include "bitext/io.hpp"
#include "bitext/xent.hpp"

namespace bitext {

namespace {

bool has(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

void require(const std::filesystem::path& p, const std::string& what) {
  if (p.empty()) throw ConfigError(what + " is required");
}

struct Collection {
  PairCorpus corpus;
  EmbeddingSet src;
  EmbeddingSet tgt;
  EmbeddedCorpus view() const { return {&corpus, &src, &tgt}; }
};

Collection load_collection(const PipelineConfig& c, const std::filesystem::path& src,
                           const std::filesystem::path& tgt, const std::filesystem::path& src_emb,
                           const std::filesystem::path& tgt_emb, Origin origin, bool embeddings) {
  Collection out{load_parallel(src, tgt, c.src_lang, c.tgt_lang), {}, {}};
  if (embeddings) {
    out.src = load_embeddings(src_emb, c.dim, Side::src, origin);
    out.tgt = load_embeddings(tgt_emb, c.dim, Side::tgt, origin);
  }
  return out;
}

std::vector<double> xent_column(const std::filesystem::path& fwd, const std::filesystem::path& bwd,
                                std::size_t n, double log_base,
                                std::span<const FilterVerdict> verdicts) {
  const auto f = read_logprobs(fwd, n, Direction::forward, log_base);
  const auto b = read_logprobs(bwd, n, Direction::backward, log_base);
  return score_corpus_xent(f, b, verdicts);
}

}  // namespace

PrefilterOptions make_prefilter_options(const PipelineConfig& config, const PairCorpus* clean) {
  PrefilterOptions options;
  options.overlap_threshold = config.overlap_threshold;
  options.min_confidence = config.lid_min_confidence;
  options.lid_enabled = config.lid;
  if (!config.lid) return options;
  if (!config.lid_labels_src.empty()) options.src_labels = read_lang_labels(config.lid_labels_src);
  if (!config.lid_labels_tgt.empty()) options.tgt_labels = read_lang_labels(config.lid_labels_tgt);
  if (options.src_labels && options.tgt_labels) return options;

  std::map<std::string, std::vector<std::string>> samples;
  for (const auto& entry : config.lid_samples) {
    const auto eq = entry.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw ConfigError("language samples look like lang=path, got '" + entry + "'");
    }
    auto lines = read_lines(entry.substr(eq + 1));
    auto& bucket = samples[entry.substr(0, eq)];
    bucket.insert(bucket.end(), lines.begin(), lines.end());
  }
  if (samples.empty() && clean) {
    samples[clean->src_lang()] = clean->texts(Side::src);
    auto tgt = clean->texts(Side::tgt);
    auto& bucket = samples[clean->tgt_lang()];
    bucket.insert(bucket.end(), tgt.begin(), tgt.end());
  }
  if (samples.empty()) {
    throw ConfigError(
        "language identification needs label files, language samples or a clean corpus "
        "(or disable it with --no-lid)");
  }
  options.lid_model = train_lid(samples);
  return options;
}

PipelineResult run_all(const PipelineConfig& config) {
  require(config.src, "--src");
  require(config.tgt, "--tgt");
  require(config.out_dir, "--out-dir");
  if (config.scorers.empty()) throw ConfigError("at least one scorer is required");
  for (const auto& s : config.scorers) {
    if (s != "margin_local" && s != "margin_global" && s != "xent") {
      throw ConfigError("unknown scorer '" + s + "'");
    }
  }
  const bool margin = has(config.scorers, "margin_local") || has(config.scorers, "margin_global");
  const bool global = has(config.scorers, "margin_global");
  const bool xent = has(config.scorers, "xent");
  const bool clean_given = !config.clean_src.empty() || !config.clean_tgt.empty();
  if (margin) {
    if (config.dim == 0) throw ConfigError("--dim is required for embedding files");
    require(config.src_emb, "--src-emb");
    require(config.tgt_emb, "--tgt-emb");
  }
  if (!config.final_score.empty() && config.features_extra.empty() && !has(config.scorers, config.final_score) &&
      !(config.ensemble && config.final_score == "ensemble")) {
    throw ConfigError("final score '" + config.final_score + "' is not produced by this run");
  }
  if ((global || config.ensemble) && !clean_given) {
    throw ConfigError("the global neighborhood and the ensemble need the clean corpus");
  }
  if (xent) {
    require(config.xent_forward, "--xent-forward");
    require(config.xent_backward, "--xent-backward");
  }
  std::filesystem::create_directories(config.out_dir);

  const Collection noisy = load_collection(config, config.src, config.tgt, config.src_emb,
                                           config.tgt_emb, Origin::noisy, margin);
  std::optional<Collection> clean;
  if (clean_given) {
    require(config.clean_src, "--clean-src");
    require(config.clean_tgt, "--clean-tgt");
    if (margin) {
      require(config.clean_src_emb, "--clean-src-emb");
      require(config.clean_tgt_emb, "--clean-tgt-emb");
    }
    clean = load_collection(config, config.clean_src, config.clean_tgt, config.clean_src_emb,
                            config.clean_tgt_emb, Origin::clean, margin);
  }
  const std::size_t n = noisy.corpus.size();

  PipelineResult result;
  result.verdicts = apply_prefilters(noisy.corpus,
                                     make_prefilter_options(config, clean ? &clean->corpus : nullptr));
  write_verdicts(result.verdicts, config.out_dir / "verdicts.tsv");

  ScoreTable features(n);
  ScoreTable clean_features(clean ? clean->corpus.size() : 0);
  MarginConfig mc;
  mc.variant = config.variant;
  mc.neighborhood.k = config.k;
  for (const auto& scorer : config.scorers) {
    if (features.has_column(scorer)) continue;
    if (scorer == "xent") {
      features.add_column(scorer, xent_column(config.xent_forward, config.xent_backward, n,
                                              config.log_base, result.verdicts));
      if (config.ensemble) {
        require(config.clean_xent_forward, "--clean-xent-forward");
        require(config.clean_xent_backward, "--clean-xent-backward");
        clean_features.add_column(
            scorer, xent_column(config.clean_xent_forward, config.clean_xent_backward,
                                clean->corpus.size(), config.log_base, {}));
      }
      continue;
    }
    mc.neighborhood.mode = scorer == "margin_global" ? Neighborhood::global : Neighborhood::local;
    const auto clean_view = clean ? std::optional(clean->view()) : std::nullopt;
    features.add_column(scorer, score_corpus(noisy.view(), clean_view ? &*clean_view : nullptr,
                                             result.verdicts, mc, config.threads));
    if (config.ensemble) {
      const auto noisy_view = noisy.view();
      clean_features.add_column(
          scorer, score_corpus(*clean_view, &noisy_view, {}, mc, config.threads));
    }
  }
  if (!config.features_extra.empty()) {
    const auto extra = read_feature_table(config.features_extra);
    if (extra.n_rows() != n) throw AlignmentError("extra feature rows do not match the corpus");
    for (const auto& [name, values] : extra.columns()) {
      auto column = values;
      apply_sentinel(column, result.verdicts);
      features.add_column(name, std::move(column));
    }
    if (config.ensemble) {
      require(config.clean_features_extra, "--clean-features-extra");
      const auto clean_extra = read_feature_table(config.clean_features_extra);
      if (clean_extra.n_rows() != clean_features.n_rows()) {
        throw AlignmentError("clean extra feature rows do not match the clean corpus");
      }
      for (const auto& name : features.names()) {
        if (!clean_features.has_column(name)) clean_features.add_column(name, clean_extra.column(name));
      }
    }
  }
  write_feature_table(features, config.out_dir / "features.tsv");

  result.scores = features;
  if (config.ensemble) {
    write_feature_table(clean_features, config.out_dir / "clean_features.tsv");
    std::vector<bool> keep(n);
    for (std::size_t i = 0; i < n; ++i) keep[i] = result.verdicts[i].pass;
    const auto train = FeatureMatrix::from_tables(clean_features, filter_rows(features, keep));
    PuOptions pu = config.pu;
    pu.threads = config.threads;
    const auto model = pu_fit(train, pu, config.iterations);
    save_model(model, config.out_dir / "model.json");

    auto votes = ensemble_scores(model, feature_values(features, model.feature_names),
                                 config.threads);
    apply_sentinel(votes, result.verdicts);
    result.scores.add_column("ensemble", std::move(votes));
  }

  result.final_column = config.final_score.empty()
                            ? (config.ensemble ? "ensemble" : config.scorers.front())
                            : config.final_score;
  for (const auto& [name, values] : result.scores.columns()) {
    write_scores(values, config.out_dir / ("scores." + name + ".txt"));
  }
  const auto& final_scores = result.scores.column(result.final_column);
  write_scores(final_scores, config.out_dir / "scores.txt");

  const Budget budget{config.budget_tokens, config.english_side};
  result.selection = subsample(noisy.corpus, final_scores, budget);
  write_selection(noisy.corpus, result.selection, budget, config.out_dir);
  return result;
}

}  // namespace bitext
