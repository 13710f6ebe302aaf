#include "bitext/selector.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bitext/error.hpp"
#include "bitext/io.hpp"
#include "bitext/text.hpp"

namespace bitext {

std::size_t count_tokens(std::string_view text) {
  std::size_t count = 0;
  bool in_token = false;
  for (char c : text) {
    const bool space = is_space(c);
    if (!space && !in_token) ++count;
    in_token = !space;
  }
  return count;
}

Selection subsample(std::span<const double> scores, std::span<const std::size_t> token_counts,
                    std::size_t target_tokens) {
  if (scores.size() != token_counts.size()) {
    throw AlignmentError("scores have " + std::to_string(scores.size()) + " rows, corpus has " +
                         std::to_string(token_counts.size()));
  }
  if (target_tokens == 0) throw ConfigError("token budget must be at least 1");
  std::vector<std::size_t> order;
  order.reserve(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!std::isfinite(scores[i])) throw DataError("non-finite score at row " + std::to_string(i));
    if (scores[i] != kSentinel) order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  Selection sel;
  for (auto i : order) {
    sel.indices.push_back(i);
    sel.tokens += token_counts[i];
    if (sel.tokens >= target_tokens) return sel;
  }
  sel.underflow = true;
  return sel;
}

Selection subsample(const PairCorpus& corpus, std::span<const double> scores,
                    const Budget& budget) {
  std::vector<std::size_t> counts(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    counts[i] = count_tokens(corpus[i].text(budget.counting_side));
  }
  return subsample(scores, counts, budget.target_tokens);
}

void write_selection(const PairCorpus& corpus, const Selection& selection, const Budget& budget,
                     const std::filesystem::path& dir) {
  std::vector<std::size_t> sorted = selection.indices;
  std::sort(sorted.begin(), sorted.end());
  std::string src, tgt, idx;
  for (auto i : sorted) {
    src += corpus[i].src_text + '\n';
    tgt += corpus[i].tgt_text + '\n';
    idx += std::to_string(i) + '\n';
  }
  std::filesystem::create_directories(dir);
  write_file_atomic(dir / "selected.src", src);
  write_file_atomic(dir / "selected.tgt", tgt);
  write_file_atomic(dir / "selected.idx", idx);
  std::string manifest;
  manifest += "pairs=" + std::to_string(selection.indices.size()) + '\n';
  manifest += "tokens=" + std::to_string(selection.tokens) + '\n';
  manifest += "target_tokens=" + std::to_string(budget.target_tokens) + '\n';
  manifest += std::string("counting_side=") + (budget.counting_side == Side::src ? "src" : "tgt") + '\n';
  manifest += std::string("underflow=") + (selection.underflow ? "true" : "false") + '\n';
  write_file_atomic(dir / "manifest.txt", manifest);
}

}  // namespace bitext
