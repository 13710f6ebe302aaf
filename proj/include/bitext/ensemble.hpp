#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "bitext/corpus.hpp"
#include "bitext/svm.hpp"

namespace bitext {

enum class Label { positive, unlabeled };

/// Score features for positive (clean) and unlabeled (noisy) rows.
struct FeatureMatrix {
  Eigen::MatrixXd values;
  std::vector<std::string> names;
  std::vector<Label> labels;

  std::size_t rows() const noexcept { return static_cast<std::size_t>(values.rows()); }
  std::size_t n_positive() const;

  /// Throws DataError on NaN, duplicate names or inconsistent sizes.
  void validate() const;

  /// Stacks positive rows on top of unlabeled rows. Columns of `positives`
  /// are matched to `unlabeled` by name (LookupError when one is missing).
  static FeatureMatrix from_tables(const ScoreTable& positives, const ScoreTable& unlabeled);
};

/// Table columns in the order of `names`; LookupError for a missing one.
Eigen::MatrixXd feature_values(const ScoreTable& table, const std::vector<std::string>& names);

/// Rows holding the prefilter sentinel in any column.
std::vector<bool> sentinel_rows(const ScoreTable& table);

/// Keeps only the rows where `keep` is true.
ScoreTable filter_rows(const ScoreTable& table, const std::vector<bool>& keep);

struct Standardization {
  Eigen::VectorXd mean;
  Eigen::VectorXd stddev;
  /// Features with zero spread; they are never drawn into a feature mask.
  std::vector<bool> constant;

  static Standardization fit(const Eigen::MatrixXd& values);
  /// Zero mean, unit variance; constant features map to 0.
  Eigen::VectorXd apply(const Eigen::Ref<const Eigen::VectorXd>& row) const;
};

struct WeakLearner {
  /// Feature indices, ordered by feature name.
  std::vector<std::size_t> feature_mask;
  std::uint64_t train_seed = 0;
  RbfSvm svm;
};

struct EnsembleModel {
  static constexpr int kFormatVersion = 1;

  std::vector<std::string> feature_names;
  Standardization standardization;
  std::vector<WeakLearner> learners;
  int iteration = 1;
};

struct PuOptions {
  std::size_t n_learners = 100;
  /// Unlabeled rows drawn per positive row for each learner.
  double bias_ratio = 2.0;
  std::uint64_t seed = 0;
  double c = 1.0;
  double tolerance = 1e-3;
  std::size_t threads = 1;
};

/// Seed of learner `index`, independent of how learners are scheduled.
std::uint64_t learner_seed(std::uint64_t master, std::uint64_t index);

/// Bagged positive-unlabeled training: every learner sees all positives and
/// ceil(bias_ratio * n_pos) unlabeled rows as negatives, on a random half of
/// the non-constant features chosen by feature name. Throws TrainingError
/// without positives, without unlabeled rows, or when every feature is
/// constant.
EnsembleModel pu_train(const FeatureMatrix& features, const PuOptions& options);

/// Fraction of learners voting positive on one raw feature row.
double ensemble_score(const EnsembleModel& model, std::span<const double> row);
std::vector<double> ensemble_scores(const EnsembleModel& model, const Eigen::MatrixXd& rows,
                                    std::size_t threads = 1);

/// Top `n_positive` rows by score become positive (ties by ascending row).
std::vector<Label> relabel_top(std::span<const double> scores, std::size_t n_positive);

/// Second iteration: rescore every row with `first`, relabel so the positive
/// count is preserved, and retrain. Throws ConfigError unless `first` is an
/// iteration-1 model.
EnsembleModel pu_iterate(const FeatureMatrix& features, const EnsembleModel& first,
                         const PuOptions& options);

/// Runs one or two iterations. Throws ConfigError for any other count.
EnsembleModel pu_fit(const FeatureMatrix& features, const PuOptions& options, int iterations);

void save_model(const EnsembleModel& model, const std::filesystem::path& path);
EnsembleModel load_model(const std::filesystem::path& path);

}  // namespace bitext
