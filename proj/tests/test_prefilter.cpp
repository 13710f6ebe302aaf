#include <gtest/gtest.h>

#include <map>
#include <random>

#include "bitext/error.hpp"
#include "bitext/io.hpp"
#include "bitext/prefilter.hpp"
#include "oracles.hpp"

using namespace bitext;

namespace {

// Lower-case ASCII only, so no folding is needed.
std::vector<std::string> naive_profile(const std::vector<std::string>& texts, std::size_t cap) {
  std::map<std::string, std::size_t> counts;
  for (const auto& text : texts) {
    std::string token;
    auto flush = [&] {
      if (token.empty()) return;
      const std::string padded = " " + token + " ";
      for (std::size_t n = 1; n <= 4; ++n) {
        for (std::size_t i = 0; i + n <= padded.size(); ++i) ++counts[padded.substr(i, n)];
      }
      token.clear();
    };
    for (char c : text) {
      if (c == ' ') flush();
      else token += c;
    }
    flush();
  }
  std::vector<std::pair<std::string, std::size_t>> items(counts.begin(), counts.end());
  std::stable_sort(items.begin(), items.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < items.size() && i < cap; ++i) out.push_back(items[i].first);
  return out;
}

std::size_t naive_distance(const std::vector<std::string>& doc,
                           const std::vector<std::string>& lang, std::size_t cap) {
  std::size_t d = 0;
  for (std::size_t r = 0; r < doc.size(); ++r) {
    auto it = std::find(lang.begin(), lang.end(), doc[r]);
    if (it == lang.end()) {
      d += cap;
    } else {
      const auto lr = static_cast<std::size_t>(it - lang.begin());
      d += lr > r ? lr - r : r - lr;
    }
  }
  return d;
}

PairCorpus corpus(std::vector<std::string> src, std::vector<std::string> tgt) {
  return PairCorpus::from_texts(std::move(src), std::move(tgt), "ne", "en");
}

LangLabels labels(std::vector<std::string> langs) {
  LangLabels l;
  l.confidence.assign(langs.size(), 1.0);
  l.lang = std::move(langs);
  return l;
}

}  // namespace

TEST(Overlap, Examples) {
  EXPECT_DOUBLE_EQ(overlap_ratio("a b c", "a b c"), 1.0);
  EXPECT_DOUBLE_EQ(overlap_ratio("a b c d e", "a v w x y"), 0.2);
  EXPECT_DOUBLE_EQ(overlap_ratio("a b", "a b c d e f"), 1.0);
  EXPECT_DOUBLE_EQ(overlap_ratio("", "a"), 0.0);
  EXPECT_DOUBLE_EQ(overlap_ratio("A b b", "a B"), 1.0);
}

TEST(Overlap, SymmetricAndReflexive) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> len(0, 8), word(0, 6);
  for (int trial = 0; trial < 2000; ++trial) {
    std::string a, b;
    for (int i = len(rng); i > 0; --i) a += "w" + std::to_string(word(rng)) + " ";
    for (int i = len(rng); i > 0; --i) b += "W" + std::to_string(word(rng)) + "  ";
    const double ab = overlap_ratio(a, b);
    EXPECT_EQ(ab, overlap_ratio(b, a));
    EXPECT_GE(ab, 0.0);
    EXPECT_LE(ab, 1.0);
    if (!a.empty()) {
      EXPECT_EQ(overlap_ratio(a, a), 1.0);
    }
  }
}

TEST(Prefilter, VerdictExamples) {
  PrefilterOptions opt;
  opt.src_labels = labels({"ne", "en", "ne"});
  opt.tgt_labels = labels({"en", "en", "en"});
  const auto v = apply_prefilters(
      corpus({"same words here", "kathmandu nepal", "namaste"}, {"same words here", "x y", "hello"}),
      opt);
  ASSERT_EQ(v.size(), 3u);
  EXPECT_EQ(v[0], FilterVerdict::reject(FilterReason::overlap));
  EXPECT_EQ(v[1], FilterVerdict::reject(FilterReason::bad_src_lang));
  EXPECT_EQ(v[2], FilterVerdict::accept());
}

TEST(Prefilter, LanguageCheckedBeforeOverlap) {
  PrefilterOptions opt;
  opt.src_labels = labels({"ne"});
  opt.tgt_labels = labels({"ne"});
  const auto v = apply_prefilters(corpus({"a b"}, {"a b"}), opt);
  EXPECT_EQ(v[0].reason, FilterReason::bad_tgt_lang);
}

TEST(Prefilter, ConfidenceThreshold) {
  PrefilterOptions opt;
  opt.src_labels = labels({"ne", "ne"});
  opt.src_labels->confidence = {0.9, 0.2};
  opt.tgt_labels = labels({"en", "en"});
  opt.min_confidence = 0.5;
  const auto v = apply_prefilters(corpus({"a", "b"}, {"c", "d"}), opt);
  EXPECT_TRUE(v[0].pass);
  EXPECT_EQ(v[1].reason, FilterReason::bad_src_lang);
}

TEST(Prefilter, Errors) {
  PrefilterOptions opt;
  EXPECT_THROW(apply_prefilters(corpus({"a"}, {"b"}), opt), ConfigError);
  opt.lid_enabled = false;
  EXPECT_EQ(apply_prefilters(corpus({"a"}, {"b"}), opt).size(), 1u);
  opt.lid_enabled = true;
  opt.src_labels = labels({"ne", "ne"});
  opt.tgt_labels = labels({"en", "en"});
  EXPECT_THROW(apply_prefilters(corpus({"a"}, {"b"}), opt), AlignmentError);
}

TEST(Prefilter, ReasonIsOkIffPass) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> coin(0, 3);
  std::vector<std::string> src, tgt, sl, tl;
  for (int i = 0; i < 300; ++i) {
    src.push_back("s" + std::to_string(coin(rng)) + " s" + std::to_string(coin(rng)));
    tgt.push_back(coin(rng) == 0 ? src.back() : "t" + std::to_string(i));
    sl.push_back(coin(rng) == 0 ? "en" : "ne");
    tl.push_back(coin(rng) == 0 ? "ne" : "en");
  }
  PrefilterOptions opt;
  opt.src_labels = labels(sl);
  opt.tgt_labels = labels(tl);
  const auto v = apply_prefilters(corpus(src, tgt), opt);
  ASSERT_EQ(v.size(), src.size());
  for (const auto& x : v) EXPECT_EQ(x.pass, x.reason == FilterReason::ok);
}

TEST(LangLabels, ParseAndCoverage) {
  const auto l = parse_lang_labels("1\ten\t0.5\n0\tne\t1\n");
  EXPECT_EQ(l.lang, (std::vector<std::string>{"ne", "en"}));
  EXPECT_EQ(l.confidence[1], 0.5);
  EXPECT_THROW(parse_lang_labels("0\ten\t1\n0\ten\t1\n"), DataError);
  EXPECT_THROW(parse_lang_labels("0\ten\t1\n2\ten\t1\n"), DataError);
  EXPECT_THROW(parse_lang_labels("0\ten\t1.5\n"), DataError);
  EXPECT_THROW(parse_lang_labels("0\ten\n"), DataError);
}

TEST(Verdicts, RoundTrip) {
  oracle::TempDir dir("verdicts");
  const std::vector<FilterVerdict> v = {FilterVerdict::accept(),
                                        FilterVerdict::reject(FilterReason::overlap),
                                        FilterVerdict::reject(FilterReason::bad_tgt_lang)};
  write_verdicts(v, dir / "v.tsv");
  EXPECT_EQ(read_verdicts(dir / "v.tsv"), v);
  std::vector<double> scores = {0.3, 0.4, 0.5};
  apply_sentinel(scores, v);
  EXPECT_EQ(scores, (std::vector<double>{0.3, -1.0, -1.0}));
}

TEST(Lid, ToyExamples) {
  const auto model = train_lid({{"xx", {"aaaa"}}, {"yy", {"bbbb"}}});
  const auto p = classify_lid(model, "aaa");
  EXPECT_EQ(p.lang, "xx");
  EXPECT_GE(p.confidence, 0.5);
  const auto empty = classify_lid(model, "");
  EXPECT_EQ(empty.lang, "unknown");
  EXPECT_EQ(empty.confidence, 0.0);
  EXPECT_EQ(classify_lid(model, "bbbb").lang, "yy");
}

TEST(Lid, SingleLanguageHasFullConfidence) {
  const auto model = train_lid({{"xx", {"hello world"}}});
  const auto p = classify_lid(model, "anything");
  EXPECT_EQ(p.lang, "xx");
  EXPECT_EQ(p.confidence, 1.0);
}

TEST(Lid, TrainingErrors) {
  EXPECT_THROW(train_lid({}), ConfigError);
  EXPECT_THROW(train_lid({{"xx", {}}}), ConfigError);
}

TEST(Lid, MatchesBruteForceRankDistance) {
  std::mt19937_64 rng(21);
  const std::string letters[3] = {"abcdef", "ghijkl", "abmnop"};
  auto sentence = [&](const std::string& alphabet) {
    std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
    std::uniform_int_distribution<int> len(2, 7);
    std::string s;
    for (int w = 0; w < 5; ++w) {
      if (!s.empty()) s += ' ';
      for (int i = len(rng); i > 0; --i) s += alphabet[pick(rng)];
    }
    return s;
  };
  std::map<std::string, std::vector<std::string>> samples;
  for (int l = 0; l < 3; ++l) {
    auto& texts = samples["l" + std::to_string(l)];
    for (int i = 0; i < 20; ++i) texts.push_back(sentence(letters[l]));
  }
  const std::size_t cap = 120;
  const auto model = train_lid(samples, cap);
  std::map<std::string, std::vector<std::string>> profiles;
  for (const auto& [lang, texts] : samples) {
    profiles[lang] = naive_profile(texts, cap);
    EXPECT_EQ(model.profile(lang), profiles[lang]) << lang;
  }
  for (int trial = 0; trial < 60; ++trial) {
    const std::string text = sentence(letters[trial % 3]);
    const auto doc = naive_profile({text}, cap);
    std::string best;
    std::size_t best_d = 0, worst_d = 0;
    for (const auto& [lang, prof] : profiles) {
      const auto d = naive_distance(doc, prof, cap);
      if (best.empty() || d < best_d) {
        best = lang;
        best_d = d;
      }
      worst_d = std::max(worst_d, d);
    }
    const auto p = classify_lid(model, text);
    EXPECT_EQ(p.lang, best);
    EXPECT_DOUBLE_EQ(p.confidence, 1.0 - static_cast<double>(best_d) / static_cast<double>(worst_d));
    EXPECT_EQ(p.lang, "l" + std::to_string(trial % 3));
  }
}

TEST(Lid, ClassifiesItsOwnTrainingText) {
  const std::map<std::string, std::vector<std::string>> samples = {
      {"en", {"the quick brown fox jumps over the lazy dog"}},
      {"de", {"der schnelle braune fuchs springt ueber den faulen hund"}},
      {"si", {"ශ්‍රී ලංකාව දකුණු ආසියාවේ දිවයිනකි"}}};
  const auto model = train_lid(samples);
  for (const auto& [lang, texts] : samples) EXPECT_EQ(classify_lid(model, texts[0]).lang, lang);
}

TEST(Lid, DrivesPrefilterWhenNoLabels) {
  PrefilterOptions opt;
  opt.lid_model = train_lid({{"ne", {"नेपाल काठमाडौं हिमाल"}}, {"en", {"mountain valley river"}}});
  const auto v = apply_prefilters(
      corpus({"नेपाल हिमाल", "river valley"}, {"mountain river", "mountain"}), opt);
  EXPECT_TRUE(v[0].pass);
  EXPECT_EQ(v[1].reason, FilterReason::bad_src_lang);
}
