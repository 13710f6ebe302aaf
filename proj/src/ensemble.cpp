#include "bitext/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <thread>

#include <json.hpp>

#include "bitext/error.hpp"
#include "bitext/io.hpp"

namespace bitext {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t iteration_seed(std::uint64_t seed, int iteration) {
  return iteration == 1 ? seed : splitmix64(seed ^ 0x2d358dccaa6c78a5ULL);
}

/// Runs body(i) for i in [0, n) on up to `threads` workers.
template <typename Body>
void parallel_for(std::size_t n, std::size_t threads, Body body) {
  threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(n, 1));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> workers;
  for (std::size_t t = 0; t < threads; ++t) {
    workers.emplace_back([&, t] {
      for (std::size_t i = t; i < n; i += threads) body(i);
    });
  }
  for (auto& w : workers) w.join();
}

}  // namespace

std::size_t FeatureMatrix::n_positive() const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), Label::positive));
}

void FeatureMatrix::validate() const {
  if (names.size() != static_cast<std::size_t>(values.cols())) {
    throw DataError("feature names do not match the column count");
  }
  if (labels.size() != rows()) throw DataError("one label per feature row is required");
  std::set<std::string> unique(names.begin(), names.end());
  if (unique.size() != names.size()) throw DataError("duplicate feature names");
  if (!values.allFinite()) throw DataError("feature matrix contains non-finite values");
}

FeatureMatrix FeatureMatrix::from_tables(const ScoreTable& positives, const ScoreTable& unlabeled) {
  FeatureMatrix fm;
  fm.names = unlabeled.names();
  const auto n_pos = static_cast<Eigen::Index>(positives.n_rows());
  const auto n_unl = static_cast<Eigen::Index>(unlabeled.n_rows());
  if (positives.n_columns() != unlabeled.n_columns()) {
    throw LookupError("positive and unlabeled feature tables have different columns");
  }
  fm.values.resize(n_pos + n_unl, static_cast<Eigen::Index>(fm.names.size()));
  for (std::size_t c = 0; c < fm.names.size(); ++c) {
    const auto& pos = positives.column(fm.names[c]);
    const auto& unl = unlabeled.column(fm.names[c]);
    const auto col = static_cast<Eigen::Index>(c);
    for (Eigen::Index r = 0; r < n_pos; ++r) fm.values(r, col) = pos[static_cast<std::size_t>(r)];
    for (Eigen::Index r = 0; r < n_unl; ++r) {
      fm.values(n_pos + r, col) = unl[static_cast<std::size_t>(r)];
    }
  }
  fm.labels.assign(static_cast<std::size_t>(n_pos), Label::positive);
  fm.labels.resize(static_cast<std::size_t>(n_pos + n_unl), Label::unlabeled);
  fm.validate();
  return fm;
}

Eigen::MatrixXd feature_values(const ScoreTable& table, const std::vector<std::string>& names) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(table.n_rows()),
                      static_cast<Eigen::Index>(names.size()));
  for (std::size_t c = 0; c < names.size(); ++c) {
    const auto& values = table.column(names[c]);
    for (std::size_t r = 0; r < values.size(); ++r) {
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = values[r];
    }
  }
  return out;
}

std::vector<bool> sentinel_rows(const ScoreTable& table) {
  std::vector<bool> out(table.n_rows(), false);
  for (const auto& [name, values] : table.columns()) {
    for (std::size_t r = 0; r < values.size(); ++r) out[r] = out[r] || values[r] == kSentinel;
  }
  return out;
}

ScoreTable filter_rows(const ScoreTable& table, const std::vector<bool>& keep) {
  const auto n = static_cast<std::size_t>(std::count(keep.begin(), keep.end(), true));
  ScoreTable out(n);
  for (const auto& [name, values] : table.columns()) {
    std::vector<double> kept;
    kept.reserve(n);
    for (std::size_t r = 0; r < values.size(); ++r) {
      if (keep[r]) kept.push_back(values[r]);
    }
    out.add_column(name, std::move(kept));
  }
  return out;
}

Standardization Standardization::fit(const Eigen::MatrixXd& values) {
  Standardization s;
  const Eigen::Index n = values.rows();
  const Eigen::Index f = values.cols();
  s.mean = Eigen::VectorXd::Zero(f);
  s.stddev = Eigen::VectorXd::Ones(f);
  s.constant.assign(static_cast<std::size_t>(f), true);
  if (n == 0) return s;
  for (Eigen::Index c = 0; c < f; ++c) {
    double sum = 0.0;
    for (Eigen::Index r = 0; r < n; ++r) sum += values(r, c);
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (Eigen::Index r = 0; r < n; ++r) ss += (values(r, c) - mean) * (values(r, c) - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n));
    s.mean(c) = mean;
    if (sd > 1e-12 * std::max(1.0, std::abs(mean))) {
      s.stddev(c) = sd;
      s.constant[static_cast<std::size_t>(c)] = false;
    }
  }
  return s;
}

Eigen::VectorXd Standardization::apply(const Eigen::Ref<const Eigen::VectorXd>& row) const {
  Eigen::VectorXd out(row.size());
  for (Eigen::Index c = 0; c < row.size(); ++c) {
    out(c) = constant[static_cast<std::size_t>(c)] ? 0.0 : (row(c) - mean(c)) / stddev(c);
  }
  return out;
}

std::uint64_t learner_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(splitmix64(master) ^ splitmix64(index + 1));
}

namespace {

std::vector<std::size_t> draw_mask(const std::vector<std::string>& names,
                                   const std::vector<bool>& constant, std::uint64_t seed) {
  std::vector<std::size_t> eligible;
  for (std::size_t c = 0; c < names.size(); ++c) {
    if (!constant[c]) eligible.push_back(c);
  }
  const std::size_t m = std::max<std::size_t>(1, (eligible.size() + 1) / 2);
  // Keys depend on the feature name only, so reordering columns selects the
  // same features.
  std::vector<std::pair<std::uint64_t, std::size_t>> keyed;
  for (auto c : eligible) keyed.emplace_back(splitmix64(seed ^ fnv1a(names[c])), c);
  std::sort(keyed.begin(), keyed.end(), [&](const auto& a, const auto& b) {
    return a.first != b.first ? a.first < b.first : names[a.second] < names[b.second];
  });
  std::vector<std::size_t> mask;
  for (std::size_t i = 0; i < m; ++i) mask.push_back(keyed[i].second);
  std::sort(mask.begin(), mask.end(),
            [&](std::size_t a, std::size_t b) { return names[a] < names[b]; });
  return mask;
}

std::vector<std::size_t> draw_unlabeled(const std::vector<std::size_t>& pool, std::size_t count,
                                        std::mt19937_64& rng) {
  std::vector<std::size_t> out;
  if (count <= pool.size()) {
    std::vector<std::size_t> work = pool;
    for (std::size_t i = 0; i < count; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, work.size() - 1);
      std::swap(work[i], work[pick(rng)]);
    }
    out.assign(work.begin(), work.begin() + static_cast<std::ptrdiff_t>(count));
  } else {
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    for (std::size_t i = 0; i < count; ++i) out.push_back(pool[pick(rng)]);
  }
  return out;
}

WeakLearner train_learner(const FeatureMatrix& features, const Eigen::MatrixXd& standardized,
                          const Standardization& stats, const std::vector<std::size_t>& positives,
                          const std::vector<std::size_t>& unlabeled, const PuOptions& options,
                          std::uint64_t seed) {
  WeakLearner learner;
  learner.train_seed = seed;
  learner.feature_mask = draw_mask(features.names, stats.constant, seed);
  std::mt19937_64 rng(seed);
  const auto n_neg =
      static_cast<std::size_t>(std::ceil(options.bias_ratio * static_cast<double>(positives.size())));
  const auto negatives = draw_unlabeled(unlabeled, std::max<std::size_t>(n_neg, 1), rng);

  const auto m = static_cast<Eigen::Index>(learner.feature_mask.size());
  const auto n = static_cast<Eigen::Index>(positives.size() + negatives.size());
  Eigen::MatrixXd x(n, m);
  std::vector<int> y(static_cast<std::size_t>(n));
  Eigen::Index r = 0;
  auto fill = [&](std::size_t row, int label) {
    for (Eigen::Index c = 0; c < m; ++c) {
      x(r, c) = standardized(static_cast<Eigen::Index>(row),
                             static_cast<Eigen::Index>(learner.feature_mask[static_cast<std::size_t>(c)]));
    }
    y[static_cast<std::size_t>(r)] = label;
    ++r;
  };
  for (auto row : positives) fill(row, 1);
  for (auto row : negatives) fill(row, -1);

  double sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index c = 0; c < m; ++c) sum += x(i, c);
  }
  const double mean = sum / static_cast<double>(n * m);
  double ss = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index c = 0; c < m; ++c) ss += (x(i, c) - mean) * (x(i, c) - mean);
  }
  const double var = ss / static_cast<double>(n * m);

  SvmParams params;
  params.c = options.c;
  params.tolerance = options.tolerance;
  params.gamma = 1.0 / (static_cast<double>(m) * (var > 0.0 ? var : 1.0));
  learner.svm = RbfSvm::train(x, y, params);
  return learner;
}

EnsembleModel train_iteration(const FeatureMatrix& features, const PuOptions& options,
                              int iteration) {
  features.validate();
  if (options.n_learners == 0) throw ConfigError("the ensemble needs at least one learner");
  if (!(options.bias_ratio > 0.0)) throw ConfigError("bias ratio must be positive");
  std::vector<std::size_t> positives, unlabeled;
  for (std::size_t r = 0; r < features.rows(); ++r) {
    (features.labels[r] == Label::positive ? positives : unlabeled).push_back(r);
  }
  if (positives.empty()) throw TrainingError("PU training needs at least one positive row");
  if (unlabeled.empty()) throw TrainingError("PU training needs at least one unlabeled row");

  EnsembleModel model;
  model.iteration = iteration;
  model.feature_names = features.names;
  model.standardization = Standardization::fit(features.values);
  const auto& constant = model.standardization.constant;
  if (std::all_of(constant.begin(), constant.end(), [](bool b) { return b; })) {
    throw TrainingError("every feature is constant");
  }
  Eigen::MatrixXd standardized(features.values.rows(), features.values.cols());
  for (Eigen::Index r = 0; r < standardized.rows(); ++r) {
    standardized.row(r) = model.standardization.apply(features.values.row(r).transpose()).transpose();
  }

  const std::uint64_t master = iteration_seed(options.seed, iteration);
  model.learners.resize(options.n_learners);
  parallel_for(options.n_learners, options.threads, [&](std::size_t l) {
    model.learners[l] = train_learner(features, standardized, model.standardization, positives,
                                      unlabeled, options, learner_seed(master, l));
  });
  return model;
}

}  // namespace

EnsembleModel pu_train(const FeatureMatrix& features, const PuOptions& options) {
  return train_iteration(features, options, 1);
}

double ensemble_score(const EnsembleModel& model, std::span<const double> row) {
  if (row.size() != model.feature_names.size()) {
    throw DataError("feature row has " + std::to_string(row.size()) + " values, model expects " +
                    std::to_string(model.feature_names.size()));
  }
  if (model.learners.empty()) throw DataError("ensemble model has no learners");
  const Eigen::VectorXd z = model.standardization.apply(
      Eigen::Map<const Eigen::VectorXd>(row.data(), static_cast<Eigen::Index>(row.size())));
  std::size_t votes = 0;
  Eigen::VectorXd masked;
  for (const auto& learner : model.learners) {
    masked.resize(static_cast<Eigen::Index>(learner.feature_mask.size()));
    for (std::size_t i = 0; i < learner.feature_mask.size(); ++i) {
      masked(static_cast<Eigen::Index>(i)) = z(static_cast<Eigen::Index>(learner.feature_mask[i]));
    }
    votes += learner.svm.decision(masked) > 0.0;
  }
  return static_cast<double>(votes) / static_cast<double>(model.learners.size());
}

std::vector<double> ensemble_scores(const EnsembleModel& model, const Eigen::MatrixXd& rows,
                                    std::size_t threads) {
  std::vector<double> out(static_cast<std::size_t>(rows.rows()));
  parallel_for(out.size(), threads, [&](std::size_t r) {
    const Eigen::VectorXd row = rows.row(static_cast<Eigen::Index>(r)).transpose();
    out[r] = ensemble_score(model, std::span<const double>(row.data(), static_cast<std::size_t>(row.size())));
  });
  return out;
}

std::vector<Label> relabel_top(std::span<const double> scores, std::size_t n_positive) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  std::vector<Label> labels(scores.size(), Label::unlabeled);
  for (std::size_t i = 0; i < std::min(n_positive, order.size()); ++i) {
    labels[order[i]] = Label::positive;
  }
  return labels;
}

EnsembleModel pu_iterate(const FeatureMatrix& features, const EnsembleModel& first,
                         const PuOptions& options) {
  if (first.iteration != 1) {
    throw ConfigError("only two iterations are supported; got a model from iteration " +
                      std::to_string(first.iteration));
  }
  if (first.feature_names != features.names) {
    throw ConfigError("model and feature matrix have different feature schemas");
  }
  const auto scores = ensemble_scores(first, features.values, options.threads);
  FeatureMatrix relabeled = features;
  relabeled.labels = relabel_top(scores, features.n_positive());
  return train_iteration(relabeled, options, 2);
}

EnsembleModel pu_fit(const FeatureMatrix& features, const PuOptions& options, int iterations) {
  if (iterations != 1 && iterations != 2) {
    throw ConfigError("ensemble iterations must be 1 or 2, got " + std::to_string(iterations));
  }
  auto model = pu_train(features, options);
  if (iterations == 2) model = pu_iterate(features, model, options);
  return model;
}

namespace {

using nlohmann::json;

json to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::VectorXd vector_from_json(const json& j) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  return v;
}

}  // namespace

void save_model(const EnsembleModel& model, const std::filesystem::path& path) {
  json j;
  j["format"] = "bitext-ensemble";
  j["version"] = EnsembleModel::kFormatVersion;
  j["iteration"] = model.iteration;
  j["feature_names"] = model.feature_names;
  const auto& s = model.standardization;
  j["mean"] = std::vector<double>(s.mean.data(), s.mean.data() + s.mean.size());
  j["stddev"] = std::vector<double>(s.stddev.data(), s.stddev.data() + s.stddev.size());
  j["constant"] = s.constant;
  json learners = json::array();
  for (const auto& l : model.learners) {
    json lj;
    lj["seed"] = l.train_seed;
    lj["mask"] = l.feature_mask;
    lj["gamma"] = l.svm.gamma();
    lj["rho"] = l.svm.rho();
    const auto& coef = l.svm.coef();
    lj["coef"] = std::vector<double>(coef.data(), coef.data() + coef.size());
    lj["support"] = to_json(l.svm.support());
    learners.push_back(std::move(lj));
  }
  j["learners"] = std::move(learners);
  write_file_atomic(path, j.dump() + "\n");
}

EnsembleModel load_model(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  try {
    if (j.at("format") != "bitext-ensemble") throw FormatError(path.string() + ": not a model file");
    if (j.at("version").get<int>() != EnsembleModel::kFormatVersion) {
      throw FormatError(path.string() + ": unsupported model version");
    }
    EnsembleModel model;
    model.iteration = j.at("iteration").get<int>();
    model.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    model.standardization.mean = vector_from_json(j.at("mean"));
    model.standardization.stddev = vector_from_json(j.at("stddev"));
    model.standardization.constant = j.at("constant").get<std::vector<bool>>();
    const auto f = model.feature_names.size();
    if (static_cast<std::size_t>(model.standardization.mean.size()) != f ||
        static_cast<std::size_t>(model.standardization.stddev.size()) != f ||
        model.standardization.constant.size() != f) {
      throw FormatError(path.string() + ": standardization does not match feature count");
    }
    for (const auto& lj : j.at("learners")) {
      WeakLearner l;
      l.train_seed = lj.at("seed").get<std::uint64_t>();
      l.feature_mask = lj.at("mask").get<std::vector<std::size_t>>();
      for (auto c : l.feature_mask) {
        if (c >= f) throw FormatError(path.string() + ": feature mask out of range");
      }
      Eigen::VectorXd coef = vector_from_json(lj.at("coef"));
      const auto& sj = lj.at("support");
      Eigen::MatrixXd support(static_cast<Eigen::Index>(sj.size()),
                              static_cast<Eigen::Index>(l.feature_mask.size()));
      if (support.rows() != coef.size()) throw FormatError(path.string() + ": support size mismatch");
      for (std::size_t r = 0; r < sj.size(); ++r) {
        if (sj[r].size() != l.feature_mask.size()) {
          throw FormatError(path.string() + ": support vector width mismatch");
        }
        for (std::size_t c = 0; c < sj[r].size(); ++c) {
          support(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = sj[r][c].get<double>();
        }
      }
      l.svm = RbfSvm(std::move(support), std::move(coef), lj.at("rho").get<double>(),
                     lj.at("gamma").get<double>());
      model.learners.push_back(std::move(l));
    }
    if (model.learners.empty()) throw FormatError(path.string() + ": model has no learners");
    return model;
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace bitext
