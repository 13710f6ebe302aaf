#include "bitext/margin.hpp"

#include <algorithm>

#include "bitext/error.hpp"
#include "dot_kernel.hpp"
#include "neighbor_sweep.hpp"

namespace bitext {

std::string_view to_string(MarginVariant variant) {
  switch (variant) {
    case MarginVariant::ratio: return "ratio";
    case MarginVariant::absolute: return "absolute";
    case MarginVariant::distance: return "distance";
  }
  return "ratio";
}

MarginVariant parse_margin_variant(std::string_view name) {
  for (auto v : {MarginVariant::ratio, MarginVariant::absolute, MarginVariant::distance}) {
    if (to_string(v) == name) return v;
  }
  throw ConfigError("unknown margin variant '" + std::string(name) + "'");
}

double margin_score(double cos_xy, const NeighborList& nn_x, const NeighborList& nn_y,
                    MarginVariant variant) {
  if (nn_x.entries.empty() || nn_y.entries.empty()) {
    throw DataError("margin needs at least one neighbor on each side");
  }
  if (variant == MarginVariant::absolute) return cos_xy;
  double a = 0.0;
  for (const auto& n : nn_x.entries) a += n.cosine;
  double b = 0.0;
  for (const auto& n : nn_y.entries) b += n.cosine;
  const auto count = static_cast<double>(nn_x.entries.size() + nn_y.entries.size());
  if (variant == MarginVariant::distance) return cos_xy - (a + b) / count;
  if (!(a + b > 0.0)) {
    throw UndefinedScoreError("ratio margin undefined: neighbor cosine sum is " +
                              std::to_string(a + b));
  }
  return count * cos_xy / (a + b);
}

namespace {

void check_collection(const EmbeddedCorpus& c, const char* what, Origin origin) {
  if (!c.corpus || !c.src || !c.tgt) throw ConfigError(std::string(what) + " set is incomplete");
  const auto n = static_cast<Eigen::Index>(c.corpus->size());
  if (c.src->size() != n || c.tgt->size() != n) {
    throw AlignmentError(std::string(what) + " corpus has " + std::to_string(n) +
                         " pairs but embeddings have " + std::to_string(c.src->size()) + " and " +
                         std::to_string(c.tgt->size()) + " rows");
  }
  if (c.src->origin() != origin || c.tgt->origin() != origin) {
    throw ConfigError(std::string(what) + " embeddings carry the wrong origin");
  }
}

}  // namespace

std::vector<double> score_corpus(const EmbeddedCorpus& scored, const EmbeddedCorpus* other,
                                 std::span<const FilterVerdict> verdicts,
                                 const MarginConfig& config, std::size_t threads) {
  if (config.neighborhood.k == 0) throw ConfigError("k must be at least 1");
  const Origin origin = scored.src ? scored.src->origin() : Origin::noisy;
  check_collection(scored, "scored", origin);
  const bool global = config.neighborhood.mode == Neighborhood::global;
  if (global) {
    if (!other) throw ConfigError("global neighborhood needs the second (clean) collection");
    check_collection(*other, "neighborhood",
                     origin == Origin::noisy ? Origin::clean : Origin::noisy);
  }
  const std::size_t n = scored.corpus->size();
  if (!verdicts.empty() && verdicts.size() != n) {
    throw AlignmentError("verdicts have " + std::to_string(verdicts.size()) +
                         " rows, corpus has " + std::to_string(n));
  }
  const Eigen::Index dim = scored.src->dim();
  if (scored.tgt->dim() != dim || (global && (other->src->dim() != dim || other->tgt->dim() != dim))) {
    throw DataError("embedding dimensions differ");
  }

  std::vector<double> scores(n, kSentinel);
  if (n == 0) return scores;

  detail::TextInterner src_texts, tgt_texts;
  const auto scored_src_ids = src_texts.add(scored.corpus->texts(Side::src));
  const auto scored_tgt_ids = tgt_texts.add(scored.corpus->texts(Side::tgt));

  const detail::PackedRows xs(scored.src->vectors());
  const detail::PackedRows ys(scored.tgt->vectors());
  std::vector<detail::TopK> nn_x(n, detail::TopK(config.neighborhood.k));
  std::vector<detail::TopK> nn_y(n, detail::TopK(config.neighborhood.k));

  // One pass over the scored cosine matrix serves both directions.
  detail::sweep(xs, ys, {&nn_x, 0, scored_tgt_ids}, {&nn_y, 0, scored_src_ids}, false, threads);
  if (global) {
    const auto other_src_ids = src_texts.add(other->corpus->texts(Side::src));
    const auto other_tgt_ids = tgt_texts.add(other->corpus->texts(Side::tgt));
    const detail::PackedRows other_xs(other->src->vectors());
    const detail::PackedRows other_ys(other->tgt->vectors());
    detail::sweep(xs, other_ys, {&nn_x, n, other_tgt_ids}, {}, false, threads);
    detail::sweep(other_xs, ys, {}, {&nn_y, n, other_src_ids}, false, threads);
  }

  NeighborList list_x, list_y;
  for (std::size_t i = 0; i < n; ++i) {
    if (!verdicts.empty() && !verdicts[i].pass) continue;
    const double cos_xy =
        std::clamp(detail::lane_dot(xs.row(i), ys.row(i), xs.stride()), -1.0, 1.0);
    list_x.entries = nn_x[i].neighbors();
    list_y.entries = nn_y[i].neighbors();
    scores[i] = margin_score(cos_xy, list_x, list_y, config.variant);
  }
  return scores;
}

}  // namespace bitext
