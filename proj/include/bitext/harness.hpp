#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bitext/corpus.hpp"
#include "bitext/embedding.hpp"
#include "bitext/prefilter.hpp"
#include "bitext/selector.hpp"

namespace bitext {

enum class NoiseType { aligned, misaligned, wrong_language, copy, truncated };
inline constexpr std::size_t kNoiseTypes = 5;
inline constexpr std::array<NoiseType, kNoiseTypes> kAllNoiseTypes = {
    NoiseType::aligned, NoiseType::misaligned, NoiseType::wrong_language, NoiseType::copy,
    NoiseType::truncated};

std::string_view to_string(NoiseType type);
NoiseType parse_noise_type(std::string_view name);

struct NoiseSpec {
  /// Indexed by NoiseType; must be nonnegative and sum to 1.
  std::array<double, kNoiseTypes> fractions{1.0, 0.0, 0.0, 0.0, 0.0};
  std::uint64_t seed = 0;
  /// Language code given to sides replaced by wrong_language noise.
  std::string third_lang = "zz";
  /// Replacement sentences for wrong_language noise; synthesized when empty.
  std::vector<std::string> third_language_texts;

  double fraction(NoiseType t) const { return fractions[static_cast<std::size_t>(t)]; }
  /// Parses "aligned=0.5,misaligned=0.5"; unnamed types get 0.
  static NoiseSpec parse(std::string_view text, std::uint64_t seed);
};

/// Exact per-type counts for n pairs: floors of n * fraction, remainders
/// handed out by largest fractional part, ties in NoiseType order.
std::array<std::size_t, kNoiseTypes> partition_counts(const NoiseSpec& spec, std::size_t n);

struct GeneratedCorpus {
  PairCorpus corpus;
  std::vector<NoiseType> labels;
  /// Ground-truth language of every side after noise injection.
  LangLabels src_lid;
  LangLabels tgt_lid;
};

/// Injects noise into a copy of `clean`. Pair i of the output derives from
/// pair i of the input. Throws ConfigError when fractions are invalid or
/// the corpus is empty.
GeneratedCorpus generate(const PairCorpus& clean, const NoiseSpec& spec);

/// Random sentences over two disjoint synthetic vocabularies: Sinhala-script
/// words on the source side, Latin words on the target side.
PairCorpus synthetic_clean_corpus(std::size_t n, std::uint64_t seed, std::string src_lang = "si",
                                  std::string tgt_lang = "en");

struct SyntheticEmbeddings {
  EmbeddingSet src;
  EmbeddingSet tgt;
};

/// Aligned pairs share a latent unit vector, each side adding independent
/// N(0, noise_sigma^2) noise per coordinate; other pairs draw independent
/// latents. The expected cosine of non-aligned pairs is 0 while that of
/// aligned pairs is positive for every finite noise_sigma; separation is
/// strong while noise_sigma * sqrt(dim) stays well below 1.
SyntheticEmbeddings synthetic_embeddings(std::span<const NoiseType> labels, std::size_t dim,
                                         double noise_sigma, std::uint64_t seed,
                                         Origin origin = Origin::noisy);

/// `index<TAB>noise_tag` rows.
void write_noise_labels(std::span<const NoiseType> labels, const std::filesystem::path& path);
std::vector<NoiseType> read_noise_labels(const std::filesystem::path& path);

/// Probability that a random positive outranks a random negative, ties
/// counting one half. Throws DataError when either class is empty.
double ranking_auc(std::span<const double> scores, const std::vector<bool>& positive);

struct EvalReport {
  double precision_at_budget = 0.0;
  double recall_at_budget = 0.0;
  double auc = 0.0;
  std::size_t selected_pairs = 0;
  std::size_t selected_tokens = 0;
  bool underflow = false;
  /// Selected pairs per noise type.
  std::array<std::size_t, kNoiseTypes> contamination{};
};

EvalReport evaluate(const PairCorpus& corpus, std::span<const double> scores,
                    std::span<const NoiseType> labels, const Budget& budget);

std::string format_report(const EvalReport& report);
std::string format_contamination_tsv(const EvalReport& report);

}  // namespace bitext
