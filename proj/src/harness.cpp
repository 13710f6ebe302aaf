#include "bitext/harness.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "bitext/error.hpp"
#include "bitext/io.hpp"
#include "bitext/text.hpp"

namespace bitext {

std::string_view to_string(NoiseType type) {
  switch (type) {
    case NoiseType::aligned: return "aligned";
    case NoiseType::misaligned: return "misaligned";
    case NoiseType::wrong_language: return "wrong_language";
    case NoiseType::copy: return "copy";
    case NoiseType::truncated: return "truncated";
  }
  return "aligned";
}

NoiseType parse_noise_type(std::string_view name) {
  for (auto t : kAllNoiseTypes) {
    if (to_string(t) == name) return t;
  }
  throw ParseError("unknown noise type '" + std::string(name) + "'");
}

namespace {

void check_fractions(const NoiseSpec& spec) {
  double sum = 0.0;
  for (double f : spec.fractions) {
    if (!(f >= 0.0) || !std::isfinite(f)) throw ConfigError("noise fractions must be nonnegative");
    sum += f;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw ConfigError("noise fractions sum to " + std::to_string(sum) + ", not 1");
  }
}

}  // namespace

NoiseSpec NoiseSpec::parse(std::string_view text, std::uint64_t seed) {
  NoiseSpec spec;
  spec.seed = seed;
  spec.fractions.fill(0.0);
  for (auto item : split(text, ',')) {
    const auto eq = item.find('=');
    double value = 0.0;
    if (eq == std::string_view::npos || !parse_double(item.substr(eq + 1), value)) {
      throw ConfigError("noise spec entries look like type=fraction, got '" + std::string(item) + "'");
    }
    NoiseType type;
    try {
      type = parse_noise_type(item.substr(0, eq));
    } catch (const ParseError& e) {
      throw ConfigError(e.what());
    }
    spec.fractions[static_cast<std::size_t>(type)] = value;
  }
  check_fractions(spec);
  return spec;
}

namespace {


class Vocabulary {
 public:
  Vocabulary(std::span<const char32_t> letters, std::size_t size, std::mt19937_64& rng) {
    std::uniform_int_distribution<std::size_t> length(2, 7);
    std::uniform_int_distribution<std::size_t> letter(0, letters.size() - 1);
    for (std::size_t i = 0; i < size; ++i) {
      std::string word;
      const std::size_t len = length(rng);
      for (std::size_t j = 0; j < len; ++j) append_code_point(word, letters[letter(rng)]);
      words_.push_back(std::move(word));
    }
  }

  std::string sentence(std::mt19937_64& rng) const {
    std::uniform_int_distribution<std::size_t> length(4, 20);
    std::uniform_int_distribution<std::size_t> pick(0, words_.size() - 1);
    std::string out;
    const std::size_t len = length(rng);
    for (std::size_t i = 0; i < len; ++i) {
      if (i) out += ' ';
      out += words_[pick(rng)];
    }
    return out;
  }

 private:
  std::vector<std::string> words_;
};

constexpr char32_t kSinhala[] = {0x0D9A, 0x0D9C, 0x0D9F, 0x0DA0, 0x0DA2, 0x0DA7, 0x0DA9, 0x0DAD,
                                 0x0DAF, 0x0DB1, 0x0DB4, 0x0DB6, 0x0DB8, 0x0DBA, 0x0DBB, 0x0DBD,
                                 0x0DC0, 0x0DC3, 0x0DC4, 0x0DC5, 0x0DCF, 0x0DD2, 0x0DD4, 0x0DD9};
constexpr char32_t kLatin[] = {U'a', U'b', U'c', U'd', U'e', U'f', U'g', U'h', U'i',
                               U'k', U'l', U'm', U'n', U'o', U'p', U'r', U's', U't',
                               U'u', U'v', U'w', U'y'};
constexpr char32_t kCyrillic[] = {0x0430, 0x0431, 0x0432, 0x0433, 0x0434, 0x0435, 0x0436, 0x0437,
                                  0x0438, 0x043A, 0x043B, 0x043C, 0x043D, 0x043E, 0x043F, 0x0440,
                                  0x0441, 0x0442, 0x0443, 0x0444, 0x044B, 0x044F};
constexpr std::size_t kVocabularySize = 3000;

}  // namespace

std::array<std::size_t, kNoiseTypes> partition_counts(const NoiseSpec& spec, std::size_t n) {
  check_fractions(spec);
  std::array<std::size_t, kNoiseTypes> counts{};
  std::array<double, kNoiseTypes> remainder{};
  std::size_t assigned = 0;
  for (std::size_t t = 0; t < kNoiseTypes; ++t) {
    const double exact = spec.fractions[t] * static_cast<double>(n);
    counts[t] = static_cast<std::size_t>(std::floor(exact));
    remainder[t] = exact - static_cast<double>(counts[t]);
    assigned += counts[t];
  }
  std::array<std::size_t, kNoiseTypes> order{};
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t i = 0; assigned < n; i = (i + 1) % kNoiseTypes) {
    if (spec.fractions[order[i]] > 0.0) {
      ++counts[order[i]];
      ++assigned;
    }
  }
  return counts;
}

GeneratedCorpus generate(const PairCorpus& clean, const NoiseSpec& spec) {
  if (clean.empty()) throw ConfigError("noise injection needs a nonempty corpus");
  const std::size_t n = clean.size();
  const auto counts = partition_counts(spec, n);
  std::mt19937_64 rng(spec.seed);

  std::vector<std::size_t> positions(n);
  std::iota(positions.begin(), positions.end(), 0);
  for (std::size_t i = n - 1; i > 0; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i);
    std::swap(positions[i], positions[pick(rng)]);
  }
  GeneratedCorpus out;
  out.labels.assign(n, NoiseType::aligned);
  std::size_t next = 0;
  for (std::size_t t = 0; t < kNoiseTypes; ++t) {
    for (std::size_t c = 0; c < counts[t]; ++c) out.labels[positions[next++]] = kAllNoiseTypes[t];
  }

  auto src = clean.texts(Side::src);
  auto tgt = clean.texts(Side::tgt);
  const auto original_tgt = tgt;
  out.src_lid.lang.assign(n, clean.src_lang());
  out.tgt_lid.lang.assign(n, clean.tgt_lang());
  out.src_lid.confidence.assign(n, 1.0);
  out.tgt_lid.confidence.assign(n, 1.0);

  // Misaligned targets follow a single random cycle, so no pair keeps its own.
  std::vector<std::size_t> misaligned;
  for (std::size_t i = 0; i < n; ++i) {
    if (out.labels[i] == NoiseType::misaligned) misaligned.push_back(i);
  }
  if (misaligned.size() >= 2) {
    std::vector<std::size_t> cycle = misaligned;
    for (std::size_t i = cycle.size() - 1; i > 0; --i) {
      std::uniform_int_distribution<std::size_t> pick(0, i - 1);
      std::swap(cycle[i], cycle[pick(rng)]);
    }
    for (std::size_t i = 0; i < misaligned.size(); ++i) tgt[misaligned[i]] = original_tgt[cycle[i]];
  } else if (misaligned.size() == 1 && n >= 2) {
    std::uniform_int_distribution<std::size_t> pick(0, n - 2);
    std::size_t other = pick(rng);
    if (other >= misaligned[0]) ++other;
    tgt[misaligned[0]] = original_tgt[other];
  }

  std::mt19937_64 vocab_rng(spec.seed ^ 0x9e3779b97f4a7c15ULL);
  const Vocabulary third_vocab(kCyrillic, kVocabularySize, vocab_rng);
  std::size_t third_next = 0;
  std::bernoulli_distribution coin(0.5);
  for (std::size_t i = 0; i < n; ++i) {
    switch (out.labels[i]) {
      case NoiseType::aligned:
      case NoiseType::misaligned:
        break;
      case NoiseType::wrong_language: {
        std::string replacement;
        if (spec.third_language_texts.empty()) {
          replacement = third_vocab.sentence(rng);
        } else {
          replacement = spec.third_language_texts[third_next++ % spec.third_language_texts.size()];
        }
        if (coin(rng)) {
          src[i] = std::move(replacement);
          out.src_lid.lang[i] = spec.third_lang;
        } else {
          tgt[i] = std::move(replacement);
          out.tgt_lid.lang[i] = spec.third_lang;
        }
        break;
      }
      case NoiseType::copy:
        tgt[i] = src[i];
        out.tgt_lid.lang[i] = clean.src_lang();
        break;
      case NoiseType::truncated: {
        const auto tokens = whitespace_tokens(original_tgt[i]);
        if (tokens.size() >= 2) {
          std::uniform_int_distribution<std::size_t> keep(1, tokens.size() - 1);
          const std::size_t k = keep(rng);
          std::string prefix;
          for (std::size_t j = 0; j < k; ++j) {
            if (j) prefix += ' ';
            prefix.append(tokens[j]);
          }
          tgt[i] = std::move(prefix);
        }
        break;
      }
    }
  }
  out.corpus = PairCorpus::from_texts(std::move(src), std::move(tgt), clean.src_lang(),
                                      clean.tgt_lang());
  return out;
}

PairCorpus synthetic_clean_corpus(std::size_t n, std::uint64_t seed, std::string src_lang,
                                  std::string tgt_lang) {
  std::mt19937_64 rng(seed);
  const Vocabulary src_vocab(kSinhala, kVocabularySize, rng);
  const Vocabulary tgt_vocab(kLatin, kVocabularySize, rng);
  std::vector<std::string> src, tgt;
  src.reserve(n);
  tgt.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    src.push_back(src_vocab.sentence(rng));
    tgt.push_back(tgt_vocab.sentence(rng));
  }
  return PairCorpus::from_texts(std::move(src), std::move(tgt), std::move(src_lang),
                                std::move(tgt_lang));
}

SyntheticEmbeddings synthetic_embeddings(std::span<const NoiseType> labels, std::size_t dim,
                                         double noise_sigma, std::uint64_t seed, Origin origin) {
  if (dim < 2) throw ConfigError("synthetic embeddings need dim >= 2");
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
    throw ConfigError("noise sigma must be a finite nonnegative number");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto rows = static_cast<Eigen::Index>(labels.size());
  const auto cols = static_cast<Eigen::Index>(dim);
  EmbeddingMatrix src(rows, cols), tgt(rows, cols);

  auto unit = [&] {
    Eigen::VectorXd v(cols);
    for (Eigen::Index d = 0; d < cols; ++d) v(d) = normal(rng);
    return Eigen::VectorXd(v / v.norm());
  };
  auto perturb = [&](const Eigen::VectorXd& latent) {
    Eigen::VectorXd v = latent;
    for (Eigen::Index d = 0; d < cols; ++d) v(d) += noise_sigma * normal(rng);
    return Eigen::VectorXd(v / v.norm());
  };
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (labels[static_cast<std::size_t>(i)] == NoiseType::aligned) {
      const Eigen::VectorXd latent = unit();
      src.row(i) = perturb(latent).transpose().cast<float>();
      tgt.row(i) = perturb(latent).transpose().cast<float>();
    } else {
      const Eigen::VectorXd a = unit();
      const Eigen::VectorXd b = unit();
      src.row(i) = perturb(a).transpose().cast<float>();
      tgt.row(i) = perturb(b).transpose().cast<float>();
    }
  }
  return {EmbeddingSet(std::move(src), Side::src, origin),
          EmbeddingSet(std::move(tgt), Side::tgt, origin)};
}

void write_noise_labels(std::span<const NoiseType> labels, const std::filesystem::path& path) {
  std::string out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    out += std::to_string(i);
    out += '\t';
    out += to_string(labels[i]);
    out += '\n';
  }
  write_file_atomic(path, out);
}

std::vector<NoiseType> read_noise_labels(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  std::vector<NoiseType> labels(lines.size());
  for (std::size_t row = 0; row < lines.size(); ++row) {
    const std::string where = path.string() + ":" + std::to_string(row + 1);
    const auto cells = split(lines[row], '\t');
    std::size_t index = 0;
    if (cells.size() != 2 || !parse_index(cells[0], index)) {
      throw ParseError(where + ": expected index<TAB>noise_tag");
    }
    if (index != row) throw CoverageError(where + ": expected index " + std::to_string(row));
    labels[row] = parse_noise_type(cells[1]);
  }
  return labels;
}

double ranking_auc(std::span<const double> scores, const std::vector<bool>& positive) {
  if (scores.size() != positive.size()) throw AlignmentError("scores and labels differ in length");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double rank_sum = 0.0;
  std::size_t n_pos = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double mid_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t t = i; t < j; ++t) {
      if (positive[order[t]]) {
        rank_sum += mid_rank;
        ++n_pos;
      }
    }
    i = j;
  }
  const std::size_t n_neg = scores.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) throw DataError("AUC needs both positive and negative rows");
  const double p = static_cast<double>(n_pos);
  return (rank_sum - p * (p + 1.0) / 2.0) / (p * static_cast<double>(n_neg));
}

EvalReport evaluate(const PairCorpus& corpus, std::span<const double> scores,
                    std::span<const NoiseType> labels, const Budget& budget) {
  if (scores.size() != corpus.size() || labels.size() != corpus.size()) {
    throw AlignmentError("corpus, scores and labels differ in length");
  }
  std::vector<bool> aligned_flags(labels.size());
  std::size_t n_aligned = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    aligned_flags[i] = labels[i] == NoiseType::aligned;
    n_aligned += aligned_flags[i];
  }
  EvalReport report;
  report.auc = ranking_auc(scores, aligned_flags);
  const Selection sel = subsample(corpus, scores, budget);
  report.selected_pairs = sel.indices.size();
  report.selected_tokens = sel.tokens;
  report.underflow = sel.underflow;
  std::size_t hits = 0;
  for (auto i : sel.indices) {
    ++report.contamination[static_cast<std::size_t>(labels[i])];
    hits += aligned_flags[i];
  }
  report.precision_at_budget =
      sel.indices.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(sel.indices.size());
  report.recall_at_budget = static_cast<double>(hits) / static_cast<double>(n_aligned);
  return report;
}

std::string format_report(const EvalReport& report) {
  std::string out;
  out += "precision_at_budget=" + format_double(report.precision_at_budget) + '\n';
  out += "recall_at_budget=" + format_double(report.recall_at_budget) + '\n';
  out += "auc=" + format_double(report.auc) + '\n';
  out += "selected_pairs=" + std::to_string(report.selected_pairs) + '\n';
  out += "selected_tokens=" + std::to_string(report.selected_tokens) + '\n';
  out += std::string("underflow=") + (report.underflow ? "true" : "false") + '\n';
  for (auto t : kAllNoiseTypes) {
    out += "selected." + std::string(to_string(t)) + '=' +
           std::to_string(report.contamination[static_cast<std::size_t>(t)]) + '\n';
  }
  return out;
}

std::string format_contamination_tsv(const EvalReport& report) {
  std::string out = "noise_type\tselected\n";
  for (auto t : kAllNoiseTypes) {
    out += std::string(to_string(t)) + '\t' +
           std::to_string(report.contamination[static_cast<std::size_t>(t)]) + '\n';
  }
  return out;
}

}  // namespace bitext
