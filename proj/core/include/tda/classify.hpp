#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tda/summaries.hpp"

namespace tda {

/// Feature vectors with aligned binary labels (+1 / -1).
class LabeledDataset {
 public:
  LabeledDataset() = default;
  /// Throws ArgumentError on a count mismatch, unequal vector lengths, or a
  /// label other than +1 / -1.
  LabeledDataset(std::vector<std::vector<double>> vectors, std::vector<int> labels);

  std::size_t size() const noexcept { return labels_.size(); }
  std::size_t dim() const noexcept { return vectors_.empty() ? 0 : vectors_.front().size(); }
  std::span<const double> vector(std::size_t i) const { return vectors_[i]; }
  int label(std::size_t i) const { return labels_[i]; }
  std::span<const int> labels() const noexcept { return labels_; }

  std::size_t count(int label) const;
  LabeledDataset subset(std::span<const std::size_t> indices) const;

 private:
  std::vector<std::vector<double>> vectors_;
  std::vector<int> labels_;
};

/// Death part first, then the landscape part. Either may be empty.
FeatureVector concat_features(const FeatureVector& death, const FeatureVector& landscape);

struct LinearModel {
  std::vector<double> weights;
  double bias = 0.0;

  double decision(std::span<const double> x) const;
  int predict(std::span<const double> x) const { return decision(x) >= 0.0 ? 1 : -1; }
};

struct SvmOptions {
  double lambda = 1e-3;
  /// Stochastic steps, one sampled example each; 0 means 100 * n.
  std::size_t epochs = 0;
  std::uint64_t seed = 0;
};

/// Soft-margin linear SVM by Pegasos stochastic subgradient descent on
///   lambda/2 * (|w|^2 + b^2) + mean_i max(0, 1 - y_i (w.x_i + b)),
/// i.e. the bias is an extra weight on a constant feature. Step t uses rate
/// 1/(lambda t) and is followed by projection onto the ball of radius
/// 1/sqrt(lambda). The returned model averages the iterates of the second
/// half of the run. Throws DegenerateTrainingError on single-class data and
/// ArgumentError for lambda <= 0.
LinearModel train_svm(const LabeledDataset& data, const SvmOptions& options);

/// Regularized hinge objective above, evaluated on `data`.
double svm_objective(const LinearModel& model, const LabeledDataset& data, double lambda);

double accuracy(const LinearModel& model, const LabeledDataset& data);

struct CrossValidationReport {
  std::vector<double> fold_accuracies;
  double mean_accuracy = 0.0;
  std::size_t folds_requested = 0;
  std::size_t folds_used = 0;
  std::vector<std::string> warnings;
};

/// Stratified k-fold cross-validation. Each class is shuffled by the seed
/// and dealt round-robin into folds, continuing the rotation across classes.
/// Folds are reduced to the smallest class count when needed (with a
/// warning). Throws ArgumentError when folds < 2, folds > samples, or a
/// class has fewer than 2 samples.
CrossValidationReport cross_validate(const LabeledDataset& data, std::size_t folds,
                                     const SvmOptions& options);

std::string model_json(const LinearModel& m, const SvmOptions& options);
std::string cv_report_json(const CrossValidationReport& r);

}  // namespace tda
