#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "bitext/knn.hpp"
#include "dot_kernel.hpp"

namespace bitext::detail {

/// Maps equal strings to equal ids across every part added.
class TextInterner {
 public:
  std::vector<std::uint32_t> add(std::span<const std::string> texts);

 private:
  std::unordered_map<std::string, std::uint32_t> ids_;
};

/// Streaming top-k with text deduplication. The result depends only on the
/// set of offers, not on their order.
class TopK {
 public:
  explicit TopK(std::size_t k = 1) : k_(k) {}

  /// Cosines are clamped to [-1, 1] before ranking.
  void offer(double cosine, std::size_t candidate, std::uint32_t text) {
    cosine = std::min(1.0, std::max(-1.0, cosine));
    if (cosine < threshold_) return;
    offer_slow(cosine, candidate, text);
  }
  void merge(const TopK& other);
  std::vector<Neighbor> neighbors() const;

 private:
  struct Entry {
    double cosine;
    std::size_t candidate;
    std::uint32_t text;
  };
  static bool better(const Entry& a, const Entry& b) {
    return a.cosine > b.cosine || (a.cosine == b.cosine && a.candidate < b.candidate);
  }
  void offer_slow(double cosine, std::size_t candidate, std::uint32_t text);

  std::size_t k_;
  double threshold_ = -std::numeric_limits<double>::infinity();
  std::vector<Entry> entries_;
};

/// Where one direction of a sweep deposits its results.
struct SweepSink {
  std::vector<TopK>* trackers = nullptr;
  /// Added to the opposite-side position to form the candidate index.
  std::size_t candidate_offset = 0;
  /// Text id of every opposite-side item.
  std::span<const std::uint32_t> candidate_texts;
};

/// Computes every row-by-column dot product once. Each product is offered to
/// the row's tracker (candidate = column) when `row_sink.trackers` is set
/// and to the column's tracker (candidate = row) when `col_sink.trackers`
/// is set. With `skip_diagonal`, products with equal row and column index
/// are not offered. Output is identical for any thread count.
void sweep(const PackedRows& rows, const PackedRows& cols, const SweepSink& row_sink,
           const SweepSink& col_sink, bool skip_diagonal, std::size_t threads);

}  // namespace bitext::detail
