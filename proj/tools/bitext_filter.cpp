// Command-line front end: one subcommand per pipeline stage plus run-all.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 data error.

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "bitext/corpus.hpp"
#include "bitext/embedding.hpp"
#include "bitext/ensemble.hpp"
#include "bitext/error.hpp"
#include "bitext/harness.hpp"
#include "bitext/io.hpp"
#include "bitext/margin.hpp"
#include "bitext/pipeline.hpp"
#include "bitext/prefilter.hpp"
#include "bitext/selector.hpp"
#include "bitext/version.hpp"
#include "bitext/xent.hpp"

namespace fs = std::filesystem;
using namespace bitext;

namespace {

std::size_t default_threads() {
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

Side parse_side(const std::string& s) {
  if (s == "src") return Side::src;
  if (s == "tgt") return Side::tgt;
  throw ConfigError("side must be 'src' or 'tgt', got '" + s + "'");
}

void add_corpus_options(CLI::App* app, PipelineConfig& c) {
  app->add_option("--src", c.src, "Source side, one sentence per line")->required();
  app->add_option("--tgt", c.tgt, "Target side, one sentence per line")->required();
  app->add_option("--src-lang", c.src_lang, "Source language code")->required();
  app->add_option("--tgt-lang", c.tgt_lang, "Target language code")->required();
}

void add_clean_options(CLI::App* app, PipelineConfig& c, bool embeddings) {
  app->add_option("--clean-src", c.clean_src, "Clean source side");
  app->add_option("--clean-tgt", c.clean_tgt, "Clean target side");
  if (embeddings) {
    app->add_option("--clean-src-emb", c.clean_src_emb, "Clean source embeddings (float32)");
    app->add_option("--clean-tgt-emb", c.clean_tgt_emb, "Clean target embeddings (float32)");
  }
}

void add_embedding_options(CLI::App* app, PipelineConfig& c) {
  app->add_option("--src-emb", c.src_emb, "Source embeddings (raw little-endian float32)");
  app->add_option("--tgt-emb", c.tgt_emb, "Target embeddings (raw little-endian float32)");
  app->add_option("--dim", c.dim, "Embedding dimension");
}

void add_prefilter_options(CLI::App* app, PipelineConfig& c) {
  app->add_option("--overlap-threshold", c.overlap_threshold, "Reject at this token overlap")
      ->capture_default_str();
  app->add_flag("!--no-lid", c.lid, "Disable language identification");
  app->add_option("--lid-labels-src", c.lid_labels_src, "Source language labels TSV");
  app->add_option("--lid-labels-tgt", c.lid_labels_tgt, "Target language labels TSV");
  app->add_option("--lid-min-confidence", c.lid_min_confidence, "Reject below this confidence")
      ->capture_default_str();
  app->add_option("--lid-samples", c.lid_samples,
                  "lang=path training text for the built-in identifier (repeatable)");
}

std::string variant_name = "ratio";
std::string neighborhood_name = "local";

void add_margin_options(CLI::App* app, PipelineConfig& c) {
  app->add_option("--variant", variant_name, "ratio, absolute or distance")->capture_default_str();
  app->add_option("--k", c.k, "Neighbors per sentence")->capture_default_str();
}

EmbeddedCorpus view(const PairCorpus& corpus, const EmbeddingSet& src, const EmbeddingSet& tgt) {
  return {&corpus, &src, &tgt};
}

void require_dim(const PipelineConfig& c) {
  if (c.dim == 0) throw ConfigError("--dim is required for embedding files");
  if (c.src_emb.empty() || c.tgt_emb.empty()) {
    throw ConfigError("--src-emb and --tgt-emb are required");
  }
}

std::vector<FilterVerdict> verdicts_or_empty(const fs::path& path, std::size_t n) {
  if (path.empty()) return {};
  auto v = read_verdicts(path);
  if (v.size() != n) throw AlignmentError(path.string() + " does not match the corpus size");
  return v;
}

// Reads key=value files and files every key under the run-all subcommand,
// so plain option names work without a [run-all] section.
class RunAllConfig : public CLI::ConfigINI {
 public:
  explicit RunAllConfig(const CLI::App* run) : run_(run) {}

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    if (run_->count_all() == 0) throw ConfigError("--config is only accepted by run-all");
    auto items = CLI::ConfigINI::from_config(input);
    for (auto& item : items) {
      if (item.parents.empty() || item.parents.front() != run_->get_name()) {
        item.parents.insert(item.parents.begin(), run_->get_name());
      }
    }
    return items;
  }

 private:
  const CLI::App* run_;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scores noisy parallel corpora and selects a token-budgeted subset"};
  app.set_version_flag("--version", std::string("bitext-filter ") + kVersion +
                                        " (score format v" + std::to_string(kScoreFormatVersion) +
                                        ", model format v" +
                                        std::to_string(EnsembleModel::kFormatVersion) +
                                        ", embedding format v" +
                                        std::to_string(kEmbeddingFormatVersion) + ")");
  app.require_subcommand(1);

  PipelineConfig cfg;
  cfg.threads = default_threads();
  fs::path out, verdicts_path, scores_path, labels_path, model_path, counts_out;
  fs::path features_path, positives_path, forward_path, backward_path;
  std::string english_side = "tgt";
  std::string noise = "aligned=1";
  std::size_t synth_n = 1000, clean_n = 1000;
  double noise_sigma = 0.1;
  double budget_aligned_fraction = 0.0;
  std::uint64_t seed = 0;

  auto* prefilter = app.add_subcommand("prefilter", "Assign rule-based verdicts to every pair");
  add_corpus_options(prefilter, cfg);
  add_clean_options(prefilter, cfg, false);
  add_prefilter_options(prefilter, cfg);
  prefilter->add_option("--out", out, "Verdicts TSV")->required();

  auto* margin = app.add_subcommand("score-margin", "Margin-based embedding similarity scores");
  add_corpus_options(margin, cfg);
  add_embedding_options(margin, cfg);
  add_clean_options(margin, cfg, true);
  add_margin_options(margin, cfg);
  margin->add_option("--neighborhood", neighborhood_name, "local or global")->capture_default_str();
  margin->add_option("--verdicts", verdicts_path, "Verdicts TSV from the prefilter");
  margin->add_option("--threads", cfg.threads, "Worker threads");
  margin->add_option("--out", out, "Score file")->required();

  auto* xent = app.add_subcommand("score-xent", "Dual conditional cross-entropy scores");
  add_corpus_options(xent, cfg);
  xent->add_option("--forward", forward_path, "Forward log-prob TSV")->required();
  xent->add_option("--backward", backward_path, "Backward log-prob TSV")->required();
  xent->add_option("--log-base", cfg.log_base, "Base of the supplied logs (default: natural)");
  xent->add_option("--verdicts", verdicts_path, "Verdicts TSV from the prefilter");
  xent->add_option("--out", out, "Score file")->required();

  int iterations = 2;
  auto* etrain = app.add_subcommand("ensemble-train", "Train the positive-unlabeled ensemble");
  etrain->add_option("--features", features_path, "Unlabeled (noisy) feature TSV")->required();
  etrain->add_option("--positives", positives_path, "Positive (clean) feature TSV")->required();
  etrain->add_option("--learners", cfg.pu.n_learners, "Number of weak learners")->capture_default_str();
  etrain->add_option("--bias", cfg.pu.bias_ratio, "Unlabeled rows per positive row")->capture_default_str();
  etrain->add_option("--iterations", iterations, "1 or 2")->capture_default_str();
  etrain->add_option("--seed", cfg.pu.seed, "Master seed")->capture_default_str();
  etrain->add_option("--threads", cfg.threads, "Worker threads");
  etrain->add_option("--out", out, "Model file")->required();

  auto* escore = app.add_subcommand("ensemble-score", "Score feature rows with a trained ensemble");
  escore->add_option("--model", model_path, "Model file")->required();
  escore->add_option("--features", features_path, "Feature TSV")->required();
  escore->add_option("--threads", cfg.threads, "Worker threads");
  escore->add_option("--out", out, "Score file")->required();

  auto* sub = app.add_subcommand("subsample", "Select top pairs up to an English-word budget");
  sub->add_option("--src", cfg.src, "Source side")->required();
  sub->add_option("--tgt", cfg.tgt, "Target side")->required();
  sub->add_option("--scores", scores_path, "Score file")->required();
  sub->add_option("--budget", cfg.budget_tokens, "English words to select")->required();
  sub->add_option("--english-side", english_side, "src or tgt")->capture_default_str();
  sub->add_option("--out-dir", out, "Output directory")->required();

  auto* gen = app.add_subcommand("synth-generate", "Generate a labeled synthetic noisy corpus");
  gen->add_option("--n", synth_n, "Noisy pairs")->capture_default_str();
  gen->add_option("--clean-n", clean_n, "Clean reference pairs")->capture_default_str();
  gen->add_option("--noise", noise, "Fractions, e.g. aligned=0.5,misaligned=0.5")->capture_default_str();
  gen->add_option("--seed", seed, "Seed")->capture_default_str();
  gen->add_option("--dim", cfg.dim, "Embedding dimension")->required();
  gen->add_option("--noise-sigma", noise_sigma, "Per-coordinate embedding noise")->capture_default_str();
  gen->add_option("--out-dir", out, "Output directory")->required();

  auto* eval = app.add_subcommand("synth-eval", "Evaluate scores against synthetic labels");
  eval->add_option("--src", cfg.src, "Source side")->required();
  eval->add_option("--tgt", cfg.tgt, "Target side")->required();
  eval->add_option("--scores", scores_path, "Score file")->required();
  eval->add_option("--labels", labels_path, "Noise labels TSV")->required();
  auto* budget_opt = eval->add_option("--budget", cfg.budget_tokens, "English words to select");
  eval->add_option("--budget-aligned-fraction", budget_aligned_fraction,
                   "Budget as a fraction of all aligned-pair English words")
      ->excludes(budget_opt);
  eval->add_option("--english-side", english_side, "src or tgt")->capture_default_str();
  eval->add_option("--out", out, "Report (key=value)");
  eval->add_option("--counts-out", counts_out, "Per-noise-type selection counts TSV");

  auto* run = app.add_subcommand("run-all", "prefilter, score, optional ensemble, subsample");
  app.set_config("--config", "", "run-all: key=value configuration file; flags override it");
  app.config_formatter(std::make_shared<RunAllConfig>(run));
  run->fallthrough();
  add_corpus_options(run, cfg);
  add_embedding_options(run, cfg);
  add_clean_options(run, cfg, true);
  add_prefilter_options(run, cfg);
  add_margin_options(run, cfg);
  run->add_option("--scorers", cfg.scorers, "margin_local, margin_global, xent")->delimiter(',');
  run->add_option("--xent-forward", cfg.xent_forward, "Forward log-prob TSV");
  run->add_option("--xent-backward", cfg.xent_backward, "Backward log-prob TSV");
  run->add_option("--clean-xent-forward", cfg.clean_xent_forward, "Clean forward log-prob TSV");
  run->add_option("--clean-xent-backward", cfg.clean_xent_backward, "Clean backward log-prob TSV");
  run->add_option("--log-base", cfg.log_base, "Base of the supplied logs (default: natural)");
  run->add_option("--features-extra", cfg.features_extra, "Extra noisy feature columns TSV");
  run->add_option("--clean-features-extra", cfg.clean_features_extra, "Extra clean feature columns TSV");
  run->add_flag("--ensemble", cfg.ensemble, "Train and apply the PU ensemble");
  run->add_option("--learners", cfg.pu.n_learners, "Number of weak learners")->capture_default_str();
  run->add_option("--bias", cfg.pu.bias_ratio, "Unlabeled rows per positive row")->capture_default_str();
  run->add_option("--iterations", cfg.iterations, "Ensemble iterations, 1 or 2")->capture_default_str();
  run->add_option("--seed", cfg.pu.seed, "Master seed")->capture_default_str();
  run->add_option("--final", cfg.final_score, "Column used for selection");
  run->add_option("--budget", cfg.budget_tokens, "English words to select")->required();
  run->add_option("--english-side", english_side, "src or tgt")->capture_default_str();
  run->add_option("--threads", cfg.threads, "Worker threads");
  run->add_option("--out-dir", cfg.out_dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    MarginConfig mc;
    mc.variant = parse_margin_variant(variant_name);
    mc.neighborhood.k = cfg.k;
    mc.neighborhood.mode = parse_neighborhood(neighborhood_name);
    cfg.variant = mc.variant;
    cfg.english_side = parse_side(english_side);
    cfg.threads = std::max<std::size_t>(1, cfg.threads);

    if (prefilter->parsed()) {
      const auto corpus = load_parallel(cfg.src, cfg.tgt, cfg.src_lang, cfg.tgt_lang);
      std::optional<PairCorpus> clean;
      if (!cfg.clean_src.empty() && !cfg.clean_tgt.empty()) {
        clean = load_parallel(cfg.clean_src, cfg.clean_tgt, cfg.src_lang, cfg.tgt_lang);
      }
      const auto verdicts =
          apply_prefilters(corpus, make_prefilter_options(cfg, clean ? &*clean : nullptr));
      write_verdicts(verdicts, out);
    } else if (margin->parsed()) {
      require_dim(cfg);
      const auto corpus = load_parallel(cfg.src, cfg.tgt, cfg.src_lang, cfg.tgt_lang);
      const auto src = load_embeddings(cfg.src_emb, cfg.dim, Side::src, Origin::noisy);
      const auto tgt = load_embeddings(cfg.tgt_emb, cfg.dim, Side::tgt, Origin::noisy);
      std::optional<PairCorpus> clean;
      std::optional<EmbeddingSet> clean_src, clean_tgt;
      if (mc.neighborhood.mode == Neighborhood::global) {
        if (cfg.clean_src.empty() || cfg.clean_tgt.empty() || cfg.clean_src_emb.empty() ||
            cfg.clean_tgt_emb.empty()) {
          throw ConfigError("global neighborhood needs --clean-src/--clean-tgt and their embeddings");
        }
        clean = load_parallel(cfg.clean_src, cfg.clean_tgt, cfg.src_lang, cfg.tgt_lang);
        clean_src = load_embeddings(cfg.clean_src_emb, cfg.dim, Side::src, Origin::clean);
        clean_tgt = load_embeddings(cfg.clean_tgt_emb, cfg.dim, Side::tgt, Origin::clean);
      }
      const auto verdicts = verdicts_or_empty(verdicts_path, corpus.size());
      const auto other = clean ? std::optional(view(*clean, *clean_src, *clean_tgt)) : std::nullopt;
      const auto scores = score_corpus(view(corpus, src, tgt), other ? &*other : nullptr,
                                       verdicts, mc, cfg.threads);
      write_scores(scores, out);
    } else if (xent->parsed()) {
      const auto corpus = load_parallel(cfg.src, cfg.tgt, cfg.src_lang, cfg.tgt_lang);
      const auto verdicts = verdicts_or_empty(verdicts_path, corpus.size());
      const auto f = read_logprobs(forward_path, corpus.size(), Direction::forward, cfg.log_base);
      const auto b = read_logprobs(backward_path, corpus.size(), Direction::backward, cfg.log_base);
      write_scores(score_corpus_xent(f, b, verdicts), out);
    } else if (etrain->parsed()) {
      const auto unlabeled = read_feature_table(features_path);
      const auto positives = read_feature_table(positives_path);
      auto keep = sentinel_rows(unlabeled);
      keep.flip();
      const auto features = FeatureMatrix::from_tables(positives, filter_rows(unlabeled, keep));
      cfg.pu.threads = cfg.threads;
      save_model(pu_fit(features, cfg.pu, iterations), out);
    } else if (escore->parsed()) {
      const auto model = load_model(model_path);
      const auto table = read_feature_table(features_path);
      auto scores = ensemble_scores(model, feature_values(table, model.feature_names), cfg.threads);
      const auto sentinel = sentinel_rows(table);
      for (std::size_t i = 0; i < scores.size(); ++i) {
        if (sentinel[i]) scores[i] = kSentinel;
      }
      write_scores(scores, out);
    } else if (sub->parsed()) {
      const auto corpus = load_parallel(cfg.src, cfg.tgt, "", "");
      const auto scores = read_scores(scores_path);
      const Budget budget{cfg.budget_tokens, cfg.english_side};
      write_selection(corpus, subsample(corpus, scores, budget), budget, out);
    } else if (gen->parsed()) {
      fs::create_directories(out);
      const auto base = synthetic_clean_corpus(synth_n + clean_n, seed);
      auto texts_src = base.texts(Side::src);
      auto texts_tgt = base.texts(Side::tgt);
      const auto split_at = static_cast<std::ptrdiff_t>(synth_n);
      const auto noisy_base = PairCorpus::from_texts(
          {texts_src.begin(), texts_src.begin() + split_at},
          {texts_tgt.begin(), texts_tgt.begin() + split_at}, base.src_lang(), base.tgt_lang());
      const auto clean = PairCorpus::from_texts({texts_src.begin() + split_at, texts_src.end()},
                                                {texts_tgt.begin() + split_at, texts_tgt.end()},
                                                base.src_lang(), base.tgt_lang());
      const auto generated = generate(noisy_base, NoiseSpec::parse(noise, seed));
      write_parallel(generated.corpus, out / "noisy.src", out / "noisy.tgt");
      write_noise_labels(generated.labels, out / "labels.tsv");
      write_lang_labels(generated.src_lid, out / "lid.src.tsv");
      write_lang_labels(generated.tgt_lid, out / "lid.tgt.tsv");
      const auto emb = synthetic_embeddings(generated.labels, cfg.dim, noise_sigma, seed + 1);
      write_embeddings(emb.src.vectors(), out / "noisy.src.emb");
      write_embeddings(emb.tgt.vectors(), out / "noisy.tgt.emb");
      if (clean_n > 0) {
        write_parallel(clean, out / "clean.src", out / "clean.tgt");
        const std::vector<NoiseType> aligned(clean_n, NoiseType::aligned);
        const auto clean_emb =
            synthetic_embeddings(aligned, cfg.dim, noise_sigma, seed + 2, Origin::clean);
        write_embeddings(clean_emb.src.vectors(), out / "clean.src.emb");
        write_embeddings(clean_emb.tgt.vectors(), out / "clean.tgt.emb");
      }
      std::cout << "wrote " << generated.corpus.size() << " noisy and " << clean.size()
                << " clean pairs (" << base.src_lang() << "-" << base.tgt_lang() << ") to "
                << out.string() << "\n";
    } else if (eval->parsed()) {
      const auto corpus = load_parallel(cfg.src, cfg.tgt, "", "");
      const auto scores = read_scores(scores_path);
      const auto labels = read_noise_labels(labels_path);
      Budget budget{cfg.budget_tokens, cfg.english_side};
      if (budget_aligned_fraction > 0.0) {
        std::size_t aligned_tokens = 0;
        for (std::size_t i = 0; i < corpus.size() && i < labels.size(); ++i) {
          if (labels[i] == NoiseType::aligned) {
            aligned_tokens += count_tokens(corpus[i].text(budget.counting_side));
          }
        }
        budget.target_tokens = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::ceil(budget_aligned_fraction *
                                                  static_cast<double>(aligned_tokens))));
      }
      const auto report = evaluate(corpus, scores, labels, budget);
      const auto text = format_report(report);
      if (out.empty()) {
        std::cout << text;
      } else {
        write_file_atomic(out, text);
      }
      if (!counts_out.empty()) write_file_atomic(counts_out, format_contamination_tsv(report));
    } else if (run->parsed()) {
      const auto result = run_all(cfg);
      std::cout << "selected " << result.selection.indices.size() << " pairs, "
                << result.selection.tokens << " tokens"
                << (result.selection.underflow ? " (budget not reached)" : "") << "\n";
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
