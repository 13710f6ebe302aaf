#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "bitext/corpus.hpp"

namespace bitext {

struct Budget {
  std::size_t target_tokens = 1;
  /// The English side, whose words are counted.
  Side counting_side = Side::tgt;
};

/// Number of maximal non-whitespace runs.
std::size_t count_tokens(std::string_view text);

struct Selection {
  /// Selected pair indices in selection order (score descending, index ascending).
  std::vector<std::size_t> indices;
  std::size_t tokens = 0;
  /// True when every eligible pair was taken without reaching the budget.
  bool underflow = false;
};

/// Takes pairs in (score desc, index asc) order, never a sentinel pair,
/// until the cumulative token count first reaches the target; the crossing
/// pair is included. Throws DataError on a non-finite score.
Selection subsample(std::span<const double> scores, std::span<const std::size_t> token_counts,
                    std::size_t target_tokens);
Selection subsample(const PairCorpus& corpus, std::span<const double> scores,
                    const Budget& budget);

/// Writes `selected.src`, `selected.tgt` and `selected.idx` (in corpus
/// order) and `manifest.txt` into `dir`.
void write_selection(const PairCorpus& corpus, const Selection& selection, const Budget& budget,
                     const std::filesystem::path& dir);

}  // namespace bitext
