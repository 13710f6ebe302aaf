#include "bitext/corpus.hpp"

#include <algorithm>
#include <cmath>

#include "bitext/error.hpp"
#include "bitext/io.hpp"
#include "bitext/text.hpp"

namespace bitext {

PairCorpus::PairCorpus(std::vector<SentencePair> pairs, std::string src_lang, std::string tgt_lang)
    : pairs_(std::move(pairs)), src_lang_(std::move(src_lang)), tgt_lang_(std::move(tgt_lang)) {
  for (std::size_t i = 0; i < pairs_.size(); ++i) {
    if (pairs_[i].index != i) throw DataError("pair indices must equal positions");
  }
}

PairCorpus PairCorpus::from_texts(std::vector<std::string> src, std::vector<std::string> tgt,
                                  std::string src_lang, std::string tgt_lang) {
  if (src.size() != tgt.size()) {
    throw AlignmentError("source has " + std::to_string(src.size()) + " sentences, target has " +
                         std::to_string(tgt.size()));
  }
  std::vector<SentencePair> pairs(src.size());
  for (std::size_t i = 0; i < src.size(); ++i) {
    pairs[i] = SentencePair{i, std::move(src[i]), std::move(tgt[i])};
  }
  return PairCorpus(std::move(pairs), std::move(src_lang), std::move(tgt_lang));
}

std::vector<std::string> PairCorpus::texts(Side side) const {
  std::vector<std::string> out;
  out.reserve(pairs_.size());
  for (const auto& p : pairs_) out.push_back(p.text(side));
  return out;
}

namespace {

std::vector<std::string> load_utf8_lines(const std::filesystem::path& path) {
  auto lines = read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (find_invalid_utf8(lines[i]) != std::string_view::npos) {
      throw FormatError(path.string() + ":" + std::to_string(i + 1) + ": invalid UTF-8");
    }
  }
  return lines;
}

std::string join_lines(const PairCorpus& corpus, Side side) {
  std::string out;
  for (const auto& p : corpus.pairs()) {
    out += p.text(side);
    out += '\n';
  }
  return out;
}

}  // namespace

PairCorpus load_parallel(const std::filesystem::path& src_path,
                         const std::filesystem::path& tgt_path, std::string src_lang,
                         std::string tgt_lang) {
  auto src = load_utf8_lines(src_path);
  auto tgt = load_utf8_lines(tgt_path);
  if (src.size() != tgt.size()) {
    throw AlignmentError(src_path.string() + " has " + std::to_string(src.size()) + " lines but " +
                         tgt_path.string() + " has " + std::to_string(tgt.size()));
  }
  return PairCorpus::from_texts(std::move(src), std::move(tgt), std::move(src_lang),
                                std::move(tgt_lang));
}

void write_parallel(const PairCorpus& corpus, const std::filesystem::path& src_path,
                    const std::filesystem::path& tgt_path) {
  write_file_atomic(src_path, join_lines(corpus, Side::src));
  write_file_atomic(tgt_path, join_lines(corpus, Side::tgt));
}

void ScoreTable::add_column(std::string name, std::vector<double> values) {
  if (name.empty() || name.find_first_of("\t\n") != std::string::npos) {
    throw DataError("invalid column name '" + name + "'");
  }
  if (has_column(name)) throw DataError("duplicate column '" + name + "'");
  if (values.size() != n_rows_) {
    throw DataError("column '" + name + "' has " + std::to_string(values.size()) +
                    " rows, table has " + std::to_string(n_rows_));
  }
  columns_.emplace_back(std::move(name), std::move(values));
}

bool ScoreTable::has_column(const std::string& name) const {
  return std::any_of(columns_.begin(), columns_.end(),
                     [&](const auto& c) { return c.first == name; });
}

const std::vector<double>& ScoreTable::column(const std::string& name) const {
  for (const auto& c : columns_) {
    if (c.first == name) return c.second;
  }
  throw LookupError("no score column named '" + name + "'");
}

std::vector<std::string> ScoreTable::names() const {
  std::vector<std::string> out;
  for (const auto& c : columns_) out.push_back(c.first);
  return out;
}

std::string format_scores(std::span<const double> values) {
  std::string out;
  out.reserve(values.size() * 20);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw DataError("non-finite score at row " + std::to_string(i));
    }
    out += format_double(values[i]);
    out += '\n';
  }
  return out;
}

void write_scores(const ScoreTable& table, const std::string& column,
                  const std::filesystem::path& path) {
  write_scores(table.column(column), path);
}

void write_scores(std::span<const double> values, const std::filesystem::path& path) {
  write_file_atomic(path, format_scores(values));
}

std::vector<double> read_scores(const std::filesystem::path& path) {
  auto lines = read_lines(path);
  std::vector<double> values(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (!parse_double(lines[i], values[i]) || !std::isfinite(values[i])) {
      throw ParseError(path.string() + ":" + std::to_string(i + 1) + ": not a finite number");
    }
  }
  return values;
}

ScoreTable parse_feature_table(std::string_view content, const std::string& source) {
  auto lines = split_lines(content);
  if (lines.empty()) throw ParseError(source + ": missing header row");
  std::vector<std::string> names;
  for (auto name : split(lines[0], '\t')) names.emplace_back(name);
  const std::size_t n_rows = lines.size() - 1;
  std::vector<std::vector<double>> cols(names.size(), std::vector<double>(n_rows));
  for (std::size_t r = 0; r < n_rows; ++r) {
    auto cells = split(lines[r + 1], '\t');
    if (cells.size() != names.size()) {
      throw ParseError(source + ": row " + std::to_string(r + 1) + " has " +
                       std::to_string(cells.size()) + " cells, header has " +
                       std::to_string(names.size()));
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (!parse_double(cells[c], cols[c][r]) || !std::isfinite(cols[c][r])) {
        throw ParseError(source + ": row " + std::to_string(r + 1) + " column '" + names[c] +
                         "': not a finite number");
      }
    }
  }
  ScoreTable table(n_rows);
  for (std::size_t c = 0; c < names.size(); ++c) {
    table.add_column(std::move(names[c]), std::move(cols[c]));
  }
  return table;
}

ScoreTable read_feature_table(const std::filesystem::path& path) {
  return parse_feature_table(read_file(path), path.string());
}

void write_feature_table(const ScoreTable& table, const std::filesystem::path& path) {
  std::string out;
  auto cols = table.columns();
  for (std::size_t c = 0; c < cols.size(); ++c) {
    if (c) out += '\t';
    out += cols[c].first;
  }
  out += '\n';
  for (std::size_t r = 0; r < table.n_rows(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      if (c) out += '\t';
      out += format_double(cols[c].second[r]);
    }
    out += '\n';
  }
  write_file_atomic(path, out);
}

}  // namespace bitext
