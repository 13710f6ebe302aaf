#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "bitext/corpus.hpp"

namespace bitext {

enum class FilterReason { ok, bad_src_lang, bad_tgt_lang, overlap };

std::string_view to_string(FilterReason reason);
/// Throws ParseError for an unknown reason name.
FilterReason parse_filter_reason(std::string_view name);

struct FilterVerdict {
  bool pass = true;
  FilterReason reason = FilterReason::ok;

  static FilterVerdict accept() { return {true, FilterReason::ok}; }
  static FilterVerdict reject(FilterReason r) { return {false, r}; }
  bool operator==(const FilterVerdict&) const = default;
};

/// Shared unique tokens over the smaller unique-token set, with
/// whitespace tokenization and case folding. Zero when either side is empty.
double overlap_ratio(std::string_view src_text, std::string_view tgt_text);

/// Externally predicted language per pair for one corpus side, indexed by
/// pair index.
struct LangLabels {
  std::vector<std::string> lang;
  std::vector<double> confidence;

  std::size_t size() const noexcept { return lang.size(); }
};

/// Parses `index<TAB>lang<TAB>confidence` rows. Indices must cover 0..n-1
/// exactly once; confidence must lie in [0, 1].
LangLabels parse_lang_labels(std::string_view content, const std::string& source = "<memory>");
LangLabels read_lang_labels(const std::filesystem::path& path);
void write_lang_labels(const LangLabels& labels, const std::filesystem::path& path);

/// Character n-gram (n = 1..4) rank-order profiles, one per language.
class NGramLangModel {
 public:
  static constexpr std::size_t kDefaultProfileSize = 300;
  static constexpr std::size_t kMaxOrder = 4;

  NGramLangModel(std::map<std::string, std::vector<std::string>> ranked_profiles,
                 std::size_t profile_size);

  std::size_t profile_size() const noexcept { return profile_size_; }
  std::vector<std::string> languages() const;
  /// N-grams of one language, most frequent first.
  const std::vector<std::string>& profile(const std::string& lang) const;
  /// Rank of an n-gram in a language profile, or nullopt when absent.
  std::optional<std::size_t> rank(const std::string& lang, const std::string& ngram) const;

 private:
  struct Profile {
    std::vector<std::string> ranked;
    std::unordered_map<std::string, std::size_t> rank;
  };
  std::map<std::string, Profile> profiles_;
  std::size_t profile_size_;
};

/// Ranked n-gram profile of a text: case-folded, whitespace tokens padded
/// with one space on each side, counts descending, ties by byte order.
std::vector<std::string> ngram_profile(std::span<const std::string> texts,
                                       std::size_t profile_size);

/// Throws ConfigError when no language or an empty sample set is given.
NGramLangModel train_lid(const std::map<std::string, std::vector<std::string>>& samples,
                         std::size_t profile_size = NGramLangModel::kDefaultProfileSize);

struct LidPrediction {
  std::string lang;
  double confidence = 0.0;
};

/// Nearest profile by out-of-place distance. Returns ("unknown", 0) when the
/// text has no n-grams.
LidPrediction classify_lid(const NGramLangModel& model, std::string_view text);

struct PrefilterOptions {
  double overlap_threshold = 0.6;
  double min_confidence = 0.0;
  bool lid_enabled = true;
  /// Precomputed labels; take priority over lid_model when both are set.
  std::optional<LangLabels> src_labels;
  std::optional<LangLabels> tgt_labels;
  std::optional<NGramLangModel> lid_model;
};

/// One verdict per pair. Language checks run before the overlap check and
/// the first failing rule names the reason.
std::vector<FilterVerdict> apply_prefilters(const PairCorpus& corpus,
                                            const PrefilterOptions& options);

/// `index<TAB>reason` rows.
void write_verdicts(std::span<const FilterVerdict> verdicts, const std::filesystem::path& path);
std::vector<FilterVerdict> read_verdicts(const std::filesystem::path& path);

/// Replaces scores of rejected pairs by the sentinel.
void apply_sentinel(std::span<double> scores, std::span<const FilterVerdict> verdicts);

}  // namespace bitext
