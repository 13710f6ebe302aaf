#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "bitext/prefilter.hpp"

namespace bitext {

enum class Direction { forward, backward };

/// Per-token natural-log probabilities from forced decoding of one pair.
struct TokenLogProbs {
  std::size_t pair_index = 0;
  Direction direction = Direction::forward;
  std::vector<double> logprobs;
};

struct DualXentRecord {
  double h_forward = 0.0;
  double h_backward = 0.0;
  double score = 0.0;
};

/// Mean token log-probability, (1/|y|) sum_t log p(y_t | y_<t, x). Higher is
/// better. Throws DataError on an empty sequence.
double sentence_xent(std::span<const double> logprobs);
inline double sentence_xent(const TokenLogProbs& tokens) { return sentence_xent(tokens.logprobs); }

/// (h_f + h_b) / 2 - |h_f - h_b|. Throws DataError on non-finite input.
double dual_score(double h_forward, double h_backward);

DualXentRecord dual_record(double h_forward, double h_backward);

/// Parses `pair_index<TAB>space-separated log-probs`, one row per pair.
/// Every index in 0..n_pairs-1 must appear exactly once (CoverageError
/// names the first missing or repeated index). Values are multiplied by
/// ln(log_base) so that base-2 decoders can be ingested; after conversion
/// every value must be <= 0.
std::vector<TokenLogProbs> parse_logprobs(std::string_view content, std::size_t n_pairs,
                                          Direction direction, double log_base = 0.0,
                                          const std::string& source = "<memory>");
std::vector<TokenLogProbs> read_logprobs(const std::filesystem::path& path, std::size_t n_pairs,
                                         Direction direction, double log_base = 0.0);

/// Dual score per pair; rejected pairs get the sentinel. `verdicts` may be
/// empty (all pass). Both inputs are indexed by pair index.
std::vector<double> score_corpus_xent(std::span<const TokenLogProbs> forward,
                                      std::span<const TokenLogProbs> backward,
                                      std::span<const FilterVerdict> verdicts);

}  // namespace bitext
