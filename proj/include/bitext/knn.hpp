#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bitext/embedding.hpp"

namespace bitext {

enum class Neighborhood { global, local };

std::string_view to_string(Neighborhood mode);
/// Throws ConfigError for anything but "global" or "local".
Neighborhood parse_neighborhood(std::string_view name);

struct NeighborhoodSpec {
  Neighborhood mode = Neighborhood::local;
  std::size_t k = 4;
};

struct Neighbor {
  /// Position in the concatenation of all pool parts, in the order given.
  std::size_t candidate = 0;
  double cosine = 0.0;

  bool operator==(const Neighbor&) const = default;
};

/// Neighbors of one query, best first: cosine descending, ties by ascending
/// candidate. No two entries share a candidate text.
struct NeighborList {
  std::size_t query_index = 0;
  std::vector<Neighbor> entries;

  bool operator==(const NeighborList&) const = default;
};

/// One collection of candidates with the sentence text of each row.
struct PoolPart {
  const EmbeddingSet* embeddings = nullptr;
  std::span<const std::string> texts;
};

struct KnnOptions {
  NeighborhoodSpec neighborhood;
  /// Skip a candidate whose (origin, side, index) equals the query's.
  bool exclude_self = false;
  std::size_t threads = 1;
};

/// Exact top-k neighbors of every query by cosine over the pool. Duplicate
/// candidate texts keep only their best occurrence. In local mode only pool
/// parts with the query set's origin are searched. Lists are shorter than k
/// when the deduplicated pool is smaller. Throws DataError when no candidate
/// is searchable or dimensions disagree.
std::vector<NeighborList> knn(const EmbeddingSet& queries, std::span<const PoolPart> pool,
                              const KnnOptions& options);

}  // namespace bitext
