#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "bitext/error.hpp"
#include "bitext/margin.hpp"
#include "oracles.hpp"

using namespace bitext;

namespace {

NeighborList list_of(std::initializer_list<double> cosines) {
  NeighborList l;
  std::size_t i = 0;
  for (double c : cosines) l.entries.push_back({i++, c});
  return l;
}

struct Instance {
  PairCorpus corpus;
  EmbeddingSet src, tgt;
};

Instance random_instance(std::size_t n, std::size_t dim, Origin origin, std::mt19937_64& rng,
                         const std::string& prefix) {
  auto sm = oracle::random_matrix(n, dim, rng);
  auto tm = oracle::random_matrix(n, dim, rng);
  // Pull aligned targets toward their sources so ratios stay well defined.
  tm = (tm * 0.5f + sm).eval();
  oracle::plant_duplicates(tm, n / 10, rng);
  auto st = oracle::random_texts(n, n, rng, prefix + "s");
  auto tt = oracle::random_texts(n, n, rng, prefix + "t");
  return {PairCorpus::from_texts(st, tt, "xx", "yy"), EmbeddingSet(sm, Side::src, origin),
          EmbeddingSet(tm, Side::tgt, origin)};
}

}  // namespace

TEST(MarginScore, Examples) {
  EXPECT_DOUBLE_EQ(margin_score(1.0, list_of({1.0}), list_of({1.0}), MarginVariant::ratio), 1.0);
  EXPECT_NEAR(margin_score(0.9, list_of({0.8}), list_of({0.6}), MarginVariant::ratio), 1.8 / 1.4,
              1e-12);
  EXPECT_NEAR(margin_score(0.9, list_of({0.8}), list_of({0.6}), MarginVariant::distance), 0.2,
              1e-12);
  EXPECT_EQ(margin_score(0.9, list_of({0.8}), list_of({0.6}), MarginVariant::absolute), 0.9);
}

TEST(MarginScore, ShortListsUseActualCounts) {
  const double r = margin_score(0.5, list_of({0.4, 0.2}), list_of({0.3}), MarginVariant::ratio);
  EXPECT_NEAR(r, 3 * 0.5 / 0.9, 1e-12);
  const double d = margin_score(0.5, list_of({0.4, 0.2}), list_of({0.3}), MarginVariant::distance);
  EXPECT_NEAR(d, 0.5 - 0.9 / 3, 1e-12);
}

TEST(MarginScore, Errors) {
  EXPECT_THROW(margin_score(0.5, list_of({}), list_of({0.1}), MarginVariant::ratio), DataError);
  EXPECT_THROW(margin_score(0.5, list_of({-0.2}), list_of({0.1}), MarginVariant::ratio),
               UndefinedScoreError);
  EXPECT_NO_THROW(margin_score(0.5, list_of({-0.2}), list_of({0.1}), MarginVariant::distance));
}

TEST(MarginScore, MonotoneInPairCosine) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.01, 1.0), c(-1.0, 1.0);
  for (int t = 0; t < 1000; ++t) {
    const auto nx = list_of({u(rng), u(rng)}), ny = list_of({u(rng)});
    double a = c(rng), b = c(rng);
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    for (auto v : {MarginVariant::ratio, MarginVariant::distance}) {
      EXPECT_LT(margin_score(a, nx, ny, v), margin_score(b, nx, ny, v));
    }
  }
}

TEST(MarginVariant, Parse) {
  EXPECT_EQ(parse_margin_variant("distance"), MarginVariant::distance);
  EXPECT_THROW(parse_margin_variant("cosine"), ConfigError);
}

TEST(ScoreCorpus, OrthogonalToyCorpus) {
  // Three pairs, each on its own axis; pair 2's target is swapped toward pair 0.
  EmbeddingMatrix s(3, 3), t(3, 3);
  s << 1, 0, 0, 0, 1, 0, 0, 0, 1;
  t << 1, 0.1f, 0, 0.1f, 1, 0, 0.9f, 0, 0.3f;
  const auto corpus = PairCorpus::from_texts({"a", "b", "c"}, {"x", "y", "z"}, "xx", "yy");
  const EmbeddingSet src(s, Side::src, Origin::noisy), tgt(t, Side::tgt, Origin::noisy);
  const auto scores = score_corpus({&corpus, &src, &tgt}, nullptr, {},
                                   {MarginVariant::ratio, {Neighborhood::local, 1}});
  EXPECT_GT(scores[0], scores[2]);
  EXPECT_GT(scores[1], scores[2]);
  EXPECT_NEAR(scores[1], 1.0, 1e-6);
}

TEST(ScoreCorpus, RejectedPairsGetSentinel) {
  std::mt19937_64 rng(8);
  const auto inst = random_instance(30, 8, Origin::noisy, rng, "");
  std::vector<FilterVerdict> v(30, FilterVerdict::reject(FilterReason::overlap));
  const auto all = score_corpus({&inst.corpus, &inst.src, &inst.tgt}, nullptr, v, {});
  for (double x : all) EXPECT_EQ(x, -1.0);
  v[3] = FilterVerdict::accept();
  const auto some = score_corpus({&inst.corpus, &inst.src, &inst.tgt}, nullptr, v, {});
  EXPECT_NE(some[3], -1.0);
  EXPECT_EQ(some[4], -1.0);
}

TEST(ScoreCorpus, GlobalNeedsOtherCollection) {
  std::mt19937_64 rng(8);
  const auto inst = random_instance(10, 4, Origin::noisy, rng, "");
  MarginConfig cfg{MarginVariant::ratio, {Neighborhood::global, 2}};
  EXPECT_THROW(score_corpus({&inst.corpus, &inst.src, &inst.tgt}, nullptr, {}, cfg), ConfigError);
  const auto same_origin = random_instance(10, 4, Origin::noisy, rng, "o");
  const EmbeddedCorpus other{&same_origin.corpus, &same_origin.src, &same_origin.tgt};
  EXPECT_THROW(score_corpus({&inst.corpus, &inst.src, &inst.tgt}, &other, {}, cfg), ConfigError);
  EXPECT_THROW(score_corpus({&inst.corpus, &inst.src, &inst.tgt}, nullptr, {},
                            {MarginVariant::ratio, {Neighborhood::local, 0}}),
               ConfigError);
}

TEST(ScoreCorpus, MatchesNaiveOracle) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 2 + rng() % 100, dim = 2 + rng() % 15;
    const std::size_t k = std::size_t{1} << (rng() % 4);
    const auto variant = static_cast<MarginVariant>(trial % 3);
    const bool global = trial % 2 == 1;
    const auto noisy = random_instance(n, dim, Origin::noisy, rng, "");
    const auto clean = random_instance(1 + rng() % 50, dim, Origin::clean, rng, "");
    const EmbeddedCorpus other{&clean.corpus, &clean.src, &clean.tgt};
    const auto st = noisy.corpus.texts(Side::src), tt = noisy.corpus.texts(Side::tgt);
    const auto cst = clean.corpus.texts(Side::src), ctt = clean.corpus.texts(Side::tgt);
    std::vector<oracle::Part> extra_src, extra_tgt;
    if (global) {
      extra_src = {{&clean.src, &cst}};
      extra_tgt = {{&clean.tgt, &ctt}};
    }
    const MarginConfig cfg{variant, {global ? Neighborhood::global : Neighborhood::local, k}};
    std::vector<double> want(n);
    bool undefined = false;
    for (std::size_t i = 0; i < n; ++i) {
      try {
        want[i] = oracle::margin(noisy.src, noisy.tgt, st, tt, extra_src, extra_tgt, i, k, variant);
      } catch (const std::domain_error&) {
        undefined = true;
      }
    }
    const EmbeddedCorpus scored{&noisy.corpus, &noisy.src, &noisy.tgt};
    if (undefined) {
      EXPECT_THROW(score_corpus(scored, global ? &other : nullptr, {}, cfg, 2), UndefinedScoreError);
      continue;
    }
    const auto got = score_corpus(scored, global ? &other : nullptr, {}, cfg, 2);
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_NEAR(got[i], want[i], 1e-6) << "trial " << trial << " pair " << i;
    }
  }
}

TEST(ScoreCorpus, DeterministicAcrossThreads) {
  std::mt19937_64 rng(31);
  const auto inst = random_instance(700, 16, Origin::noisy, rng, "");
  const auto a = score_corpus({&inst.corpus, &inst.src, &inst.tgt}, nullptr, {}, {}, 1);
  const auto b = score_corpus({&inst.corpus, &inst.src, &inst.tgt}, nullptr, {}, {}, 4);
  const auto c = score_corpus({&inst.corpus, &inst.src, &inst.tgt}, nullptr, {}, {}, 1);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, c);
}

TEST(ScoreCorpus, AbsoluteRanksLikeRawCosine) {
  std::mt19937_64 rng(12);
  const auto inst = random_instance(200, 8, Origin::noisy, rng, "");
  const auto scores = score_corpus({&inst.corpus, &inst.src, &inst.tgt}, nullptr, {},
                                   {MarginVariant::absolute, {Neighborhood::local, 4}});
  std::vector<double> raw(200);
  for (std::size_t i = 0; i < 200; ++i) {
    raw[i] = oracle::dot(inst.src, static_cast<Eigen::Index>(i), inst.tgt,
                         static_cast<Eigen::Index>(i));
  }
  EXPECT_EQ(oracle::selection_order(scores), oracle::selection_order(raw));
}
