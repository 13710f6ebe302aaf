#include "bitext/prefilter.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <unordered_set>

#include "bitext/error.hpp"
#include "bitext/io.hpp"
#include "bitext/text.hpp"

namespace bitext {

std::string_view to_string(FilterReason reason) {
  switch (reason) {
    case FilterReason::ok: return "ok";
    case FilterReason::bad_src_lang: return "bad_src_lang";
    case FilterReason::bad_tgt_lang: return "bad_tgt_lang";
    case FilterReason::overlap: return "overlap";
  }
  return "ok";
}

FilterReason parse_filter_reason(std::string_view name) {
  for (auto r : {FilterReason::ok, FilterReason::bad_src_lang, FilterReason::bad_tgt_lang,
                 FilterReason::overlap}) {
    if (to_string(r) == name) return r;
  }
  throw ParseError("unknown filter reason '" + std::string(name) + "'");
}

namespace {

std::unordered_set<std::string> folded_token_set(std::string_view text) {
  std::unordered_set<std::string> set;
  for (auto token : whitespace_tokens(text)) set.insert(case_fold(token));
  return set;
}

}  // namespace

double overlap_ratio(std::string_view src_text, std::string_view tgt_text) {
  const auto src = folded_token_set(src_text);
  const auto tgt = folded_token_set(tgt_text);
  if (src.empty() || tgt.empty()) return 0.0;
  const auto& small = src.size() <= tgt.size() ? src : tgt;
  const auto& large = src.size() <= tgt.size() ? tgt : src;
  std::size_t shared = 0;
  for (const auto& t : small) shared += large.count(t);
  return static_cast<double>(shared) / static_cast<double>(small.size());
}

LangLabels parse_lang_labels(std::string_view content, const std::string& source) {
  auto lines = split_lines(content);
  LangLabels labels;
  labels.lang.resize(lines.size());
  labels.confidence.resize(lines.size());
  std::vector<bool> seen(lines.size(), false);
  for (std::size_t row = 0; row < lines.size(); ++row) {
    const std::string where = source + ":" + std::to_string(row + 1);
    auto cells = split(lines[row], '\t');
    if (cells.size() != 3) throw ParseError(where + ": expected index, lang, confidence");
    std::size_t index = 0;
    double conf = 0.0;
    if (!parse_index(cells[0], index)) throw ParseError(where + ": bad index");
    if (!parse_double(cells[2], conf) || !(conf >= 0.0 && conf <= 1.0)) {
      throw ParseError(where + ": confidence must lie in [0, 1]");
    }
    if (index >= lines.size() || seen[index]) {
      throw CoverageError(where + ": index " + std::to_string(index) +
                          " is out of range or repeated");
    }
    seen[index] = true;
    labels.lang[index] = std::string(cells[1]);
    labels.confidence[index] = conf;
  }
  return labels;
}

LangLabels read_lang_labels(const std::filesystem::path& path) {
  return parse_lang_labels(read_file(path), path.string());
}

void write_lang_labels(const LangLabels& labels, const std::filesystem::path& path) {
  std::string out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    out += std::to_string(i) + '\t' + labels.lang[i] + '\t' +
           format_double(labels.confidence[i]) + '\n';
  }
  write_file_atomic(path, out);
}

NGramLangModel::NGramLangModel(std::map<std::string, std::vector<std::string>> ranked_profiles,
                               std::size_t profile_size)
    : profile_size_(profile_size) {
  for (auto& [lang, ranked] : ranked_profiles) {
    Profile p;
    p.ranked = std::move(ranked);
    for (std::size_t r = 0; r < p.ranked.size(); ++r) {
      if (!p.rank.emplace(p.ranked[r], r).second) {
        throw DataError("duplicate n-gram in profile for " + lang);
      }
    }
    profiles_.emplace(lang, std::move(p));
  }
}

std::vector<std::string> NGramLangModel::languages() const {
  std::vector<std::string> out;
  for (const auto& [lang, p] : profiles_) out.push_back(lang);
  return out;
}

const std::vector<std::string>& NGramLangModel::profile(const std::string& lang) const {
  auto it = profiles_.find(lang);
  if (it == profiles_.end()) throw LookupError("no profile for language " + lang);
  return it->second.ranked;
}

std::optional<std::size_t> NGramLangModel::rank(const std::string& lang,
                                                const std::string& ngram) const {
  auto it = profiles_.find(lang);
  if (it == profiles_.end()) return std::nullopt;
  auto r = it->second.rank.find(ngram);
  if (r == it->second.rank.end()) return std::nullopt;
  return r->second;
}

std::vector<std::string> ngram_profile(std::span<const std::string> texts,
                                       std::size_t profile_size) {
  std::unordered_map<std::string, std::size_t> counts;
  for (const auto& text : texts) {
    const std::string folded = case_fold(text);
    for (auto token : whitespace_tokens(folded)) {
      std::string padded = " ";
      padded.append(token);
      padded += ' ';
      const auto chars = code_points(padded);
      for (std::size_t n = 1; n <= NGramLangModel::kMaxOrder; ++n) {
        for (std::size_t i = 0; i + n <= chars.size(); ++i) {
          std::string gram;
          for (std::size_t j = i; j < i + n; ++j) gram += chars[j];
          ++counts[gram];
        }
      }
    }
  }
  std::vector<std::pair<std::string, std::size_t>> items(counts.begin(), counts.end());
  std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  if (items.size() > profile_size) items.resize(profile_size);
  std::vector<std::string> ranked;
  ranked.reserve(items.size());
  for (auto& item : items) ranked.push_back(std::move(item.first));
  return ranked;
}

NGramLangModel train_lid(const std::map<std::string, std::vector<std::string>>& samples,
                         std::size_t profile_size) {
  if (samples.empty()) throw ConfigError("language identification needs at least one language");
  if (profile_size == 0) throw ConfigError("profile size must be positive");
  std::map<std::string, std::vector<std::string>> profiles;
  for (const auto& [lang, texts] : samples) {
    auto ranked = ngram_profile(texts, profile_size);
    if (ranked.empty()) throw ConfigError("no nonempty sample text for language " + lang);
    profiles.emplace(lang, std::move(ranked));
  }
  return NGramLangModel(std::move(profiles), profile_size);
}

LidPrediction classify_lid(const NGramLangModel& model, std::string_view text) {
  const std::string input(text);
  const auto doc = ngram_profile(std::span(&input, 1), model.profile_size());
  if (doc.empty()) return {"unknown", 0.0};

  const auto langs = model.languages();
  std::vector<double> distance(langs.size(), 0.0);
  for (std::size_t l = 0; l < langs.size(); ++l) {
    std::size_t d = 0;
    for (std::size_t r = 0; r < doc.size(); ++r) {
      auto lr = model.rank(langs[l], doc[r]);
      d += lr ? (*lr > r ? *lr - r : r - *lr) : model.profile_size();
    }
    distance[l] = static_cast<double>(d);
  }
  std::size_t best = 0;
  for (std::size_t l = 1; l < langs.size(); ++l) {
    if (distance[l] < distance[best]) best = l;
  }
  if (langs.size() == 1) return {langs[best], 1.0};
  const double worst = *std::max_element(distance.begin(), distance.end());
  if (worst <= 0.0) return {langs[best], 0.0};
  const double conf = std::clamp(1.0 - distance[best] / worst, 0.0, 1.0);
  return {langs[best], conf};
}

namespace {

/// Predicts the language of one side for every pair.
LangLabels side_predictions(const PairCorpus& corpus, Side side,
                            const std::optional<LangLabels>& labels,
                            const std::optional<NGramLangModel>& model) {
  if (labels) {
    if (labels->size() != corpus.size()) {
      throw AlignmentError(std::string(side == Side::src ? "source" : "target") +
                           " language labels have " + std::to_string(labels->size()) +
                           " rows, corpus has " + std::to_string(corpus.size()));
    }
    return *labels;
  }
  if (!model) {
    throw ConfigError("language identification needs label files or a trained model");
  }
  LangLabels out;
  out.lang.reserve(corpus.size());
  out.confidence.reserve(corpus.size());
  for (const auto& pair : corpus.pairs()) {
    auto p = classify_lid(*model, pair.text(side));
    out.lang.push_back(std::move(p.lang));
    out.confidence.push_back(p.confidence);
  }
  return out;
}

}  // namespace

std::vector<FilterVerdict> apply_prefilters(const PairCorpus& corpus,
                                            const PrefilterOptions& options) {
  std::optional<LangLabels> src, tgt;
  if (options.lid_enabled) {
    src = side_predictions(corpus, Side::src, options.src_labels, options.lid_model);
    tgt = side_predictions(corpus, Side::tgt, options.tgt_labels, options.lid_model);
  }
  auto lang_ok = [&](const LangLabels& labels, std::size_t i, const std::string& declared) {
    return labels.lang[i] == declared && !(labels.confidence[i] < options.min_confidence);
  };

  std::vector<FilterVerdict> verdicts(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (src && !lang_ok(*src, i, corpus.src_lang())) {
      verdicts[i] = FilterVerdict::reject(FilterReason::bad_src_lang);
    } else if (tgt && !lang_ok(*tgt, i, corpus.tgt_lang())) {
      verdicts[i] = FilterVerdict::reject(FilterReason::bad_tgt_lang);
    } else if (overlap_ratio(corpus[i].src_text, corpus[i].tgt_text) >=
               options.overlap_threshold) {
      verdicts[i] = FilterVerdict::reject(FilterReason::overlap);
    }
  }
  return verdicts;
}

void write_verdicts(std::span<const FilterVerdict> verdicts, const std::filesystem::path& path) {
  std::string out;
  for (std::size_t i = 0; i < verdicts.size(); ++i) {
    out += std::to_string(i);
    out += '\t';
    out += to_string(verdicts[i].reason);
    out += '\n';
  }
  write_file_atomic(path, out);
}

std::vector<FilterVerdict> read_verdicts(const std::filesystem::path& path) {
  auto lines = read_lines(path);
  std::vector<FilterVerdict> verdicts(lines.size());
  for (std::size_t row = 0; row < lines.size(); ++row) {
    const std::string where = path.string() + ":" + std::to_string(row + 1);
    auto cells = split(lines[row], '\t');
    std::size_t index = 0;
    if (cells.size() != 2 || !parse_index(cells[0], index)) {
      throw ParseError(where + ": expected index<TAB>reason");
    }
    if (index != row) throw CoverageError(where + ": expected index " + std::to_string(row));
    auto reason = parse_filter_reason(cells[1]);
    verdicts[row] = {reason == FilterReason::ok, reason};
  }
  return verdicts;
}

void apply_sentinel(std::span<double> scores, std::span<const FilterVerdict> verdicts) {
  if (scores.size() != verdicts.size()) {
    throw AlignmentError("verdicts have " + std::to_string(verdicts.size()) + " rows, scores have " +
                         std::to_string(scores.size()));
  }
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!verdicts[i].pass) scores[i] = kSentinel;
  }
}

}  // namespace bitext
