#include "bitext/knn.hpp"

#include <algorithm>
#include <thread>

#include "bitext/error.hpp"
#include "neighbor_sweep.hpp"

namespace bitext {

std::string_view to_string(Neighborhood mode) {
  return mode == Neighborhood::global ? "global" : "local";
}

Neighborhood parse_neighborhood(std::string_view name) {
  if (name == "global") return Neighborhood::global;
  if (name == "local") return Neighborhood::local;
  throw ConfigError("neighborhood must be 'global' or 'local', got '" + std::string(name) + "'");
}

namespace detail {

std::vector<std::uint32_t> TextInterner::add(std::span<const std::string> texts) {
  std::vector<std::uint32_t> out;
  out.reserve(texts.size());
  for (const auto& t : texts) {
    auto [it, inserted] = ids_.try_emplace(t, static_cast<std::uint32_t>(ids_.size()));
    out.push_back(it->second);
  }
  return out;
}

void TopK::offer_slow(double cosine, std::size_t candidate, std::uint32_t text) {
  const Entry e{cosine, candidate, text};
  if (entries_.size() == k_ && !better(e, entries_.back())) return;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].text != text) continue;
    if (!better(e, entries_[i])) return;
    entries_.erase(entries_.begin() + static_cast<std::ptrdiff_t>(i));
    break;
  }
  auto pos = std::upper_bound(entries_.begin(), entries_.end(), e,
                              [](const Entry& a, const Entry& b) { return better(a, b); });
  entries_.insert(pos, e);
  if (entries_.size() > k_) entries_.pop_back();
  if (entries_.size() == k_) threshold_ = entries_.back().cosine;
}

void TopK::merge(const TopK& other) {
  for (const auto& e : other.entries_) offer(e.cosine, e.candidate, e.text);
}

std::vector<Neighbor> TopK::neighbors() const {
  std::vector<Neighbor> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back({e.candidate, e.cosine});
  return out;
}

namespace {

constexpr std::size_t kRowTile = 64;
constexpr std::size_t kColTile = 256;

void sweep_rows(const PackedRows& rows, const PackedRows& cols, const SweepSink& row_sink,
                const SweepSink& col_sink, std::vector<TopK>* col_trackers, bool skip_diagonal,
                std::size_t row_begin, std::size_t row_end) {
  std::vector<double> tile(kRowTile * kColTile);
  const std::size_t n_cols = cols.rows();
  for (std::size_t r0 = row_begin; r0 < row_end; r0 += kRowTile) {
    const std::size_t nr = std::min(kRowTile, row_end - r0);
    const std::size_t nr_padded = std::min(kRowTile, rows.padded_rows() - r0);
    for (std::size_t c0 = 0; c0 < n_cols; c0 += kColTile) {
      const std::size_t nc = std::min(kColTile, n_cols - c0);
      const std::size_t nc_padded = std::min(kColTile, cols.padded_rows() - c0);
      dot_tile(rows.row(r0), nr_padded, cols.row(c0), nc_padded, rows.stride(), tile.data(),
               kColTile);
      for (std::size_t i = 0; i < nr; ++i) {
        const std::size_t r = r0 + i;
        const double* line = tile.data() + i * kColTile;
        if (row_sink.trackers) {
          TopK& tracker = (*row_sink.trackers)[r];
          for (std::size_t j = 0; j < nc; ++j) {
            const std::size_t c = c0 + j;
            if (skip_diagonal && r == c) continue;
            tracker.offer(line[j], row_sink.candidate_offset + c, row_sink.candidate_texts[c]);
          }
        }
        if (col_trackers) {
          const std::size_t cand = col_sink.candidate_offset + r;
          const std::uint32_t text = col_sink.candidate_texts[r];
          for (std::size_t j = 0; j < nc; ++j) {
            const std::size_t c = c0 + j;
            if (skip_diagonal && r == c) continue;
            (*col_trackers)[c].offer(line[j], cand, text);
          }
        }
      }
    }
  }
}

}  // namespace

void sweep(const PackedRows& rows, const PackedRows& cols, const SweepSink& row_sink,
           const SweepSink& col_sink, bool skip_diagonal, std::size_t threads) {
  if (rows.stride() != cols.stride()) throw DataError("embedding dimensions differ");
  const std::size_t n_rows = rows.rows();
  if (n_rows == 0 || cols.rows() == 0) return;
  const std::size_t n_tiles = (n_rows + kRowTile - 1) / kRowTile;
  threads = std::clamp<std::size_t>(threads, 1, n_tiles);

  if (threads == 1) {
    sweep_rows(rows, cols, row_sink, col_sink, col_sink.trackers, skip_diagonal, 0, n_rows);
    return;
  }
  // Row tiles are split into contiguous ranges; column trackers are private
  // per worker and merged afterwards.
  std::vector<std::vector<TopK>> private_cols(col_sink.trackers ? threads : 0);
  std::vector<std::thread> workers;
  for (std::size_t t = 0; t < threads; ++t) {
    const std::size_t begin = n_tiles * t / threads * kRowTile;
    const std::size_t end = std::min(n_rows, n_tiles * (t + 1) / threads * kRowTile);
    std::vector<TopK>* cols_out = nullptr;
    if (col_sink.trackers) {
      private_cols[t] = *col_sink.trackers;
      cols_out = &private_cols[t];
    }
    workers.emplace_back(sweep_rows, std::cref(rows), std::cref(cols), std::cref(row_sink),
                         std::cref(col_sink), cols_out, skip_diagonal, begin, end);
  }
  for (auto& w : workers) w.join();
  if (col_sink.trackers) {
    for (auto& part : private_cols) {
      for (std::size_t c = 0; c < part.size(); ++c) (*col_sink.trackers)[c].merge(part[c]);
    }
  }
}

}  // namespace detail

std::vector<NeighborList> knn(const EmbeddingSet& queries, std::span<const PoolPart> pool,
                              const KnnOptions& options) {
  if (options.neighborhood.k == 0) throw ConfigError("k must be at least 1");
  detail::TextInterner interner;
  std::vector<std::vector<std::uint32_t>> text_ids;
  for (const auto& part : pool) {
    if (!part.embeddings) throw DataError("pool part without embeddings");
    if (part.texts.size() != static_cast<std::size_t>(part.embeddings->size())) {
      throw AlignmentError("pool part has " + std::to_string(part.embeddings->size()) +
                           " vectors but " + std::to_string(part.texts.size()) + " texts");
    }
    if (part.embeddings->dim() != queries.dim()) throw DataError("embedding dimensions differ");
    text_ids.push_back(interner.add(part.texts));
  }

  const detail::PackedRows packed_queries(queries.vectors());
  std::vector<detail::TopK> trackers(static_cast<std::size_t>(queries.size()),
                                     detail::TopK(options.neighborhood.k));
  std::size_t offset = 0;
  bool searched = false;
  for (std::size_t p = 0; p < pool.size(); ++p) {
    const EmbeddingSet& part = *pool[p].embeddings;
    const bool eligible = options.neighborhood.mode == Neighborhood::global ||
                          part.origin() == queries.origin();
    if (eligible && part.size() > 0) {
      searched = true;
      const bool self = options.exclude_self && part.origin() == queries.origin() &&
                        part.side() == queries.side();
      const detail::PackedRows packed(part.vectors());
      detail::sweep(packed_queries, packed, {&trackers, offset, text_ids[p]}, {}, self,
                    options.threads);
    }
    offset += static_cast<std::size_t>(part.size());
  }
  if (!searched) throw DataError("k-NN pool is empty");

  std::vector<NeighborList> out(trackers.size());
  for (std::size_t q = 0; q < trackers.size(); ++q) {
    out[q].query_index = q;
    out[q].entries = trackers[q].neighbors();
  }
  return out;
}

}  // namespace bitext
