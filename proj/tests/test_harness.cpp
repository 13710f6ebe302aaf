#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "bitext/error.hpp"
#include "bitext/harness.hpp"
#include "bitext/margin.hpp"
#include "bitext/prefilter.hpp"
#include "bitext/text.hpp"
#include "oracles.hpp"

using namespace bitext;

namespace {

NoiseSpec only(NoiseType t, std::uint64_t seed = 1) {
  NoiseSpec s;
  s.fractions = {0, 0, 0, 0, 0};
  s.fractions[static_cast<std::size_t>(t)] = 1.0;
  s.seed = seed;
  return s;
}

}  // namespace

TEST(NoiseSpec, ParseAndValidate) {
  const auto s = NoiseSpec::parse("aligned=0.5,misaligned=0.25,copy=0.25", 3);
  EXPECT_EQ(s.fraction(NoiseType::aligned), 0.5);
  EXPECT_EQ(s.fraction(NoiseType::truncated), 0.0);
  EXPECT_EQ(s.seed, 3u);
  EXPECT_THROW(NoiseSpec::parse("aligned=0.5", 0), ConfigError);
  EXPECT_THROW(NoiseSpec::parse("aligned=1.5,copy=-0.5", 0), ConfigError);
  EXPECT_THROW(NoiseSpec::parse("bogus=1", 0), ConfigError);
  EXPECT_THROW(generate(PairCorpus{}, only(NoiseType::aligned)), ConfigError);
}

TEST(Partition, ExactCounts) {
  const auto s = NoiseSpec::parse("aligned=0.5,misaligned=0.5", 0);
  const auto c = partition_counts(s, 1000);
  EXPECT_EQ(c[0], 500u);
  EXPECT_EQ(c[1], 500u);
  const auto thirds = partition_counts(NoiseSpec::parse("aligned=0.3333333333333333,copy=0.3333333333333333,truncated=0.3333333333333334", 0), 10);
  EXPECT_EQ(thirds[0] + thirds[3] + thirds[4], 10u);
}

TEST(Generate, AlignedIsIdentity) {
  const auto clean = synthetic_clean_corpus(200, 4);
  const auto g = generate(clean, only(NoiseType::aligned));
  EXPECT_EQ(g.corpus.texts(Side::src), clean.texts(Side::src));
  EXPECT_EQ(g.corpus.texts(Side::tgt), clean.texts(Side::tgt));
  for (auto l : g.labels) EXPECT_EQ(l, NoiseType::aligned);
}

TEST(Generate, CopyCopiesSource) {
  const auto clean = synthetic_clean_corpus(100, 5);
  const auto g = generate(clean, only(NoiseType::copy));
  for (const auto& p : g.corpus.pairs()) EXPECT_EQ(p.tgt_text, p.src_text);
  for (const auto& l : g.tgt_lid.lang) EXPECT_EQ(l, clean.src_lang());
}

TEST(Generate, MisalignedIsDerangement) {
  const auto clean = synthetic_clean_corpus(500, 6);
  const auto g = generate(clean, NoiseSpec::parse("aligned=0.5,misaligned=0.5", 6));
  std::size_t mis = 0;
  for (std::size_t i = 0; i < clean.size(); ++i) {
    if (g.labels[i] == NoiseType::misaligned) {
      ++mis;
      EXPECT_NE(g.corpus[i].tgt_text, clean[i].tgt_text);
    } else {
      EXPECT_EQ(g.corpus[i].tgt_text, clean[i].tgt_text);
    }
    EXPECT_EQ(g.corpus[i].src_text, clean[i].src_text);
  }
  EXPECT_EQ(mis, 250u);
}

TEST(Generate, WrongLanguageAndTruncated) {
  const auto clean = synthetic_clean_corpus(300, 7);
  const auto g = generate(clean, NoiseSpec::parse("wrong_language=0.5,truncated=0.5", 7));
  for (std::size_t i = 0; i < clean.size(); ++i) {
    if (g.labels[i] == NoiseType::wrong_language) {
      const bool src_changed = g.src_lid.lang[i] == "zz";
      const bool tgt_changed = g.tgt_lid.lang[i] == "zz";
      EXPECT_NE(src_changed, tgt_changed);
      if (src_changed) {
        EXPECT_NE(g.corpus[i].src_text, clean[i].src_text);
      }
      if (tgt_changed) {
        EXPECT_NE(g.corpus[i].tgt_text, clean[i].tgt_text);
      }
    } else {
      const auto full = whitespace_tokens(clean[i].tgt_text);
      const auto cut = whitespace_tokens(g.corpus[i].tgt_text);
      ASSERT_LT(cut.size(), full.size());
      ASSERT_GE(cut.size(), 1u);
      for (std::size_t j = 0; j < cut.size(); ++j) EXPECT_EQ(cut[j], full[j]);
    }
  }
}

TEST(Generate, DeterministicUnderSeed) {
  const auto clean = synthetic_clean_corpus(300, 8);
  const auto spec = NoiseSpec::parse("aligned=0.2,misaligned=0.2,wrong_language=0.2,copy=0.2,truncated=0.2", 9);
  const auto a = generate(clean, spec), b = generate(clean, spec);
  EXPECT_EQ(a.labels, b.labels);
  EXPECT_EQ(a.corpus.texts(Side::tgt), b.corpus.texts(Side::tgt));
  EXPECT_EQ(a.corpus.texts(Side::src), b.corpus.texts(Side::src));
}

TEST(Generate, CopiesAreCaughtByOverlap) {
  const auto clean = synthetic_clean_corpus(200, 10);
  const auto g = generate(clean, NoiseSpec::parse("aligned=0.5,copy=0.5", 10));
  PrefilterOptions opt;
  opt.src_labels = g.src_lid;
  opt.tgt_labels = g.tgt_lid;
  opt.lid_enabled = false;
  const auto v = apply_prefilters(g.corpus, opt);
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (g.labels[i] == NoiseType::copy) {
      EXPECT_EQ(v[i].reason, FilterReason::overlap);
    } else {
      EXPECT_TRUE(v[i].pass);
    }
  }
}

TEST(SyntheticEmbeddings, NoiselessAlignedPairsCoincide) {
  std::vector<NoiseType> labels(100, NoiseType::aligned);
  for (std::size_t i = 50; i < 100; ++i) labels[i] = NoiseType::misaligned;
  const auto e = synthetic_embeddings(labels, 64, 0.0, 11);
  for (Eigen::Index i = 0; i < 100; ++i) {
    const double c = oracle::dot(e.src, i, e.tgt, i);
    if (i < 50) {
      EXPECT_NEAR(c, 1.0, 1e-6);
    } else {
      EXPECT_LT(std::abs(c), 0.5);
    }
  }
  const auto again = synthetic_embeddings(labels, 64, 0.0, 11);
  EXPECT_EQ(again.src.vectors(), e.src.vectors());
  EXPECT_EQ(again.tgt.vectors(), e.tgt.vectors());
}

TEST(SyntheticEmbeddings, AlignedMeanCosineExceedsOthers) {
  std::vector<NoiseType> labels(400, NoiseType::aligned);
  for (std::size_t i = 200; i < 400; ++i) labels[i] = NoiseType::misaligned;
  const auto e = synthetic_embeddings(labels, 32, 0.1, 12);
  double aligned = 0.0, other = 0.0;
  for (Eigen::Index i = 0; i < 400; ++i) {
    (i < 200 ? aligned : other) += oracle::dot(e.src, i, e.tgt, i) / 200.0;
  }
  EXPECT_GT(aligned, 0.5);
  EXPECT_LT(std::abs(other), 0.1);
}

TEST(Auc, Examples) {
  const std::vector<bool> pos = {true, true, false, false};
  EXPECT_EQ(ranking_auc(std::vector<double>{1, 1, 0, 0}, pos), 1.0);
  EXPECT_EQ(ranking_auc(std::vector<double>{0, 0, 1, 1}, pos), 0.0);
  EXPECT_EQ(ranking_auc(std::vector<double>{3, 3, 3, 3}, pos), 0.5);
  EXPECT_THROW(ranking_auc(std::vector<double>{1, 2}, std::vector<bool>{true, true}), DataError);
}

TEST(Auc, MatchesPairCountingAndIsMonotoneInvariant) {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 2 + rng() % 200;
    std::vector<double> s(n), transformed(n);
    std::vector<bool> pos(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = static_cast<double>(rng() % 10);
      pos[i] = i == 0 || (i != 1 && rng() % 2);
      transformed[i] = std::exp(0.3 * s[i]) - 7.0;
    }
    EXPECT_NEAR(ranking_auc(s, pos), oracle::pairwise_auc(s, pos), 1e-12);
    EXPECT_NEAR(ranking_auc(transformed, pos), ranking_auc(s, pos), 1e-12);
  }
}

TEST(Evaluate, PerfectScores) {
  const auto clean = synthetic_clean_corpus(100, 14);
  const auto g = generate(clean, NoiseSpec::parse("aligned=0.5,misaligned=0.5", 14));
  std::vector<double> scores(100);
  std::size_t aligned_tokens = 0;
  for (std::size_t i = 0; i < 100; ++i) {
    scores[i] = g.labels[i] == NoiseType::aligned ? 1.0 : 0.0;
    if (scores[i] > 0) aligned_tokens += count_tokens(g.corpus[i].tgt_text);
  }
  const auto r = evaluate(g.corpus, scores, g.labels, {aligned_tokens / 2, Side::tgt});
  EXPECT_EQ(r.precision_at_budget, 1.0);
  EXPECT_EQ(r.auc, 1.0);
  EXPECT_EQ(r.contamination[0], r.selected_pairs);
  const auto text = format_report(r);
  EXPECT_NE(text.find("auc=1\n"), std::string::npos);
  EXPECT_NE(text.find("selected.misaligned=0\n"), std::string::npos);
}

TEST(NoiseLabels, RoundTrip) {
  oracle::TempDir dir("labels");
  const std::vector<NoiseType> l = {NoiseType::copy, NoiseType::aligned, NoiseType::truncated};
  write_noise_labels(l, dir / "l.tsv");
  EXPECT_EQ(read_noise_labels(dir / "l.tsv"), l);
}

TEST(SyntheticCorpus, ScriptsAndLengths) {
  const auto c = synthetic_clean_corpus(50, 15);
  EXPECT_EQ(c.src_lang(), "si");
  EXPECT_EQ(c.tgt_lang(), "en");
  for (const auto& p : c.pairs()) {
    const auto n = count_tokens(p.tgt_text);
    EXPECT_GE(n, 4u);
    EXPECT_LE(n, 20u);
    EXPECT_EQ(find_invalid_utf8(p.src_text), std::string_view::npos);
    EXPECT_EQ(overlap_ratio(p.src_text, p.tgt_text), 0.0);
  }
}
