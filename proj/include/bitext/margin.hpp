#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "bitext/corpus.hpp"
#include "bitext/embedding.hpp"
#include "bitext/knn.hpp"
#include "bitext/prefilter.hpp"

namespace bitext {

/// ratio:    (k_x + k_y) cos(x, y) / (A + B)
/// absolute: cos(x, y)
/// distance: cos(x, y) - (A + B) / (k_x + k_y)
/// where A and B sum the neighbor cosines of x and of y and k_x, k_y are the
/// actual list lengths. Only ratio appears in the method description; the
/// other two follow the margin-criterion literature it builds on.
enum class MarginVariant { ratio, absolute, distance };

std::string_view to_string(MarginVariant variant);
MarginVariant parse_margin_variant(std::string_view name);

struct MarginConfig {
  MarginVariant variant = MarginVariant::ratio;
  NeighborhoodSpec neighborhood;
};

/// Throws DataError on an empty list and UndefinedScoreError when the ratio
/// denominator is not positive.
double margin_score(double cos_xy, const NeighborList& nn_x, const NeighborList& nn_y,
                    MarginVariant variant);

/// A corpus together with the embeddings of both of its sides.
struct EmbeddedCorpus {
  const PairCorpus* corpus = nullptr;
  const EmbeddingSet* src = nullptr;
  const EmbeddingSet* tgt = nullptr;
};

/// Margin score of every pair of `scored`. Neighbors of x come from the
/// target side and neighbors of y from the source side; the local
/// neighborhood searches `scored` only, the global one `scored` and `other`.
/// Rejected pairs get the sentinel. `verdicts` may be empty (all pass).
/// Throws ConfigError when global mode lacks `other`.
std::vector<double> score_corpus(const EmbeddedCorpus& scored, const EmbeddedCorpus* other,
                                 std::span<const FilterVerdict> verdicts,
                                 const MarginConfig& config, std::size_t threads = 1);

}  // namespace bitext
