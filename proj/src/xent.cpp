#include "bitext/xent.hpp"

#include <cmath>

#include "bitext/error.hpp"
#include "bitext/io.hpp"
#include "bitext/text.hpp"

namespace bitext {

double sentence_xent(std::span<const double> logprobs) {
  if (logprobs.empty()) throw DataError("cross-entropy of an empty token sequence");
  double sum = 0.0;
  for (double lp : logprobs) sum += lp;
  return sum / static_cast<double>(logprobs.size());
}

double dual_score(double h_forward, double h_backward) {
  if (!std::isfinite(h_forward) || !std::isfinite(h_backward)) {
    throw DataError("dual cross-entropy needs finite inputs");
  }
  return (h_forward + h_backward) / 2.0 - std::abs(h_forward - h_backward);
}

DualXentRecord dual_record(double h_forward, double h_backward) {
  return {h_forward, h_backward, dual_score(h_forward, h_backward)};
}

std::vector<TokenLogProbs> parse_logprobs(std::string_view content, std::size_t n_pairs,
                                          Direction direction, double log_base,
                                          const std::string& source) {
  double scale = 1.0;
  if (log_base != 0.0) {
    if (!(log_base > 1.0) || !std::isfinite(log_base)) {
      throw ConfigError("log base must be greater than 1");
    }
    scale = std::log(log_base);
  }
  std::vector<TokenLogProbs> out(n_pairs);
  std::vector<bool> seen(n_pairs, false);
  const auto lines = split_lines(content);
  for (std::size_t row = 0; row < lines.size(); ++row) {
    const std::string where = source + ":" + std::to_string(row + 1);
    const auto tab = lines[row].find('\t');
    if (tab == std::string::npos) throw ParseError(where + ": expected index<TAB>log-probs");
    std::size_t index = 0;
    if (!parse_index(std::string_view(lines[row]).substr(0, tab), index)) {
      throw ParseError(where + ": bad pair index");
    }
    if (index >= n_pairs) {
      throw CoverageError(where + ": pair index " + std::to_string(index) + " out of range");
    }
    if (seen[index]) throw CoverageError(where + ": duplicate pair index " + std::to_string(index));
    seen[index] = true;
    TokenLogProbs& t = out[index];
    t.pair_index = index;
    t.direction = direction;
    for (auto token : whitespace_tokens(std::string_view(lines[row]).substr(tab + 1))) {
      double v = 0.0;
      if (!parse_double(token, v) || !std::isfinite(v)) {
        throw ParseError(where + ": bad log-probability '" + std::string(token) + "'");
      }
      v *= scale;
      if (v > 0.0) throw ParseError(where + ": positive log-probability");
      t.logprobs.push_back(v);
    }
  }
  for (std::size_t i = 0; i < n_pairs; ++i) {
    if (!seen[i]) throw CoverageError(source + ": missing pair index " + std::to_string(i));
  }
  return out;
}

std::vector<TokenLogProbs> read_logprobs(const std::filesystem::path& path, std::size_t n_pairs,
                                         Direction direction, double log_base) {
  return parse_logprobs(read_file(path), n_pairs, direction, log_base, path.string());
}

std::vector<double> score_corpus_xent(std::span<const TokenLogProbs> forward,
                                      std::span<const TokenLogProbs> backward,
                                      std::span<const FilterVerdict> verdicts) {
  if (forward.size() != backward.size() ||
      (!verdicts.empty() && verdicts.size() != forward.size())) {
    throw AlignmentError("forward, backward and verdict rows differ in count");
  }
  std::vector<double> scores(forward.size(), kSentinel);
  for (std::size_t i = 0; i < forward.size(); ++i) {
    if (!verdicts.empty() && !verdicts[i].pass) continue;
    try {
      scores[i] = dual_score(sentence_xent(forward[i]), sentence_xent(backward[i]));
    } catch (const DataError& e) {
      throw DataError("pair " + std::to_string(i) + ": " + e.what());
    }
  }
  return scores;
}

}  // namespace bitext
