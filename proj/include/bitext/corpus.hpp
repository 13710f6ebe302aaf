#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace bitext {

enum class Side { src, tgt };

struct SentencePair {
  std::size_t index = 0;
  std::string src_text;
  std::string tgt_text;

  const std::string& text(Side side) const { return side == Side::src ? src_text : tgt_text; }
};

/// Aligned sentence pairs; pair i comes from line i of both input files.
/// Texts are kept byte for byte as read.
class PairCorpus {
 public:
  PairCorpus() = default;
  PairCorpus(std::vector<SentencePair> pairs, std::string src_lang, std::string tgt_lang);

  /// Builds a corpus from parallel text vectors, assigning indices 0..n-1.
  static PairCorpus from_texts(std::vector<std::string> src, std::vector<std::string> tgt,
                               std::string src_lang, std::string tgt_lang);

  std::size_t size() const noexcept { return pairs_.size(); }
  bool empty() const noexcept { return pairs_.empty(); }
  const SentencePair& operator[](std::size_t i) const { return pairs_[i]; }
  std::span<const SentencePair> pairs() const noexcept { return pairs_; }
  const std::string& src_lang() const noexcept { return src_lang_; }
  const std::string& tgt_lang() const noexcept { return tgt_lang_; }
  const std::string& lang(Side side) const { return side == Side::src ? src_lang_ : tgt_lang_; }

  /// All texts of one side, in pair order.
  std::vector<std::string> texts(Side side) const;

 private:
  std::vector<SentencePair> pairs_;
  std::string src_lang_;
  std::string tgt_lang_;
};

/// Loads two line-aligned UTF-8 files. Throws AlignmentError when the line
/// counts differ and FormatError (with a 1-based line number) on bad UTF-8.
PairCorpus load_parallel(const std::filesystem::path& src_path,
                         const std::filesystem::path& tgt_path, std::string src_lang,
                         std::string tgt_lang);

void write_parallel(const PairCorpus& corpus, const std::filesystem::path& src_path,
                    const std::filesystem::path& tgt_path);

/// Value reserved for pairs rejected by the rule-based prefilters.
inline constexpr double kSentinel = -1.0;

/// Named per-pair score columns of equal length, kept in insertion order.
class ScoreTable {
 public:
  explicit ScoreTable(std::size_t n_rows = 0) : n_rows_(n_rows) {}

  std::size_t n_rows() const noexcept { return n_rows_; }
  std::size_t n_columns() const noexcept { return columns_.size(); }

  /// Throws DataError on a length mismatch, a duplicate or invalid name.
  void add_column(std::string name, std::vector<double> values);

  bool has_column(const std::string& name) const;
  /// Throws LookupError for an unknown column.
  const std::vector<double>& column(const std::string& name) const;
  std::vector<std::string> names() const;
  std::span<const std::pair<std::string, std::vector<double>>> columns() const noexcept {
    return columns_;
  }

 private:
  std::size_t n_rows_;
  std::vector<std::pair<std::string, std::vector<double>>> columns_;
};

/// One shortest-round-trip decimal per line, row order. NaN or infinity
/// is rejected with DataError.
std::string format_scores(std::span<const double> values);
void write_scores(const ScoreTable& table, const std::string& column,
                  const std::filesystem::path& path);
void write_scores(std::span<const double> values, const std::filesystem::path& path);

/// Reads a score file (one float per line) back into a vector.
std::vector<double> read_scores(const std::filesystem::path& path);

/// Parses a TSV table whose first line holds the column names.
ScoreTable parse_feature_table(std::string_view content, const std::string& source = "<memory>");
ScoreTable read_feature_table(const std::filesystem::path& path);
void write_feature_table(const ScoreTable& table, const std::filesystem::path& path);

}  // namespace bitext
