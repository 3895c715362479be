#include "tda/classify.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <numeric>

#include "tda/error.hpp"
#include "tda/random.hpp"

namespace tda {

LabeledDataset::LabeledDataset(std::vector<std::vector<double>> vectors,
                               std::vector<int> labels)
    : vectors_(std::move(vectors)), labels_(std::move(labels)) {
  if (vectors_.size() != labels_.size()) {
    throw ArgumentError("dataset: vector and label counts differ");
  }
  for (const auto& v : vectors_) {
    if (v.size() != vectors_.front().size()) {
      throw ArgumentError("dataset: feature vectors differ in length");
    }
  }
  for (int y : labels_) {
    if (y != 1 && y != -1) throw ArgumentError("dataset: labels must be +1 or -1");
  }
}

std::size_t LabeledDataset::count(int label) const {
  return static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(), label));
}

LabeledDataset LabeledDataset::subset(std::span<const std::size_t> indices) const {
  std::vector<std::vector<double>> v;
  std::vector<int> y;
  v.reserve(indices.size());
  y.reserve(indices.size());
  for (std::size_t i : indices) {
    v.push_back(vectors_.at(i));
    y.push_back(labels_.at(i));
  }
  return LabeledDataset(std::move(v), std::move(y));
}

FeatureVector concat_features(const FeatureVector& death, const FeatureVector& landscape) {
  FeatureVector out{death.values, FeatureKind::concatenated, std::nullopt};
  out.values.insert(out.values.end(), landscape.values.begin(), landscape.values.end());
  return out;
}

double LinearModel::decision(std::span<const double> x) const {
  if (x.size() != weights.size()) throw ArgumentError("model/feature length mismatch");
  double s = bias;
  for (std::size_t k = 0; k < x.size(); ++k) s += weights[k] * x[k];
  return s;
}

LinearModel train_svm(const LabeledDataset& data, const SvmOptions& options) {
  if (!(options.lambda > 0.0)) throw ArgumentError("train_svm: lambda must be > 0");
  if (data.size() == 0 || data.count(1) == 0 || data.count(-1) == 0) {
    throw DegenerateTrainingError("train_svm: need samples from both classes");
  }
  const std::size_t n = data.size();
  const std::size_t d = data.dim();
  const std::size_t steps = options.epochs ? options.epochs : 100 * n;
  const double lambda = options.lambda;
  const double radius = 1.0 / std::sqrt(lambda);

  // Bias stored as weight d on an implicit constant feature 1.
  std::vector<double> w(d + 1, 0.0);
  std::vector<double> avg(d + 1, 0.0);
  std::size_t averaged = 0;
  const std::size_t tail_start = steps / 2 + 1;
  Rng rng(options.seed);

  for (std::size_t t = 1; t <= steps; ++t) {
    const auto i = static_cast<std::size_t>(rng.below(n));
    const auto x = data.vector(i);
    const double y = data.label(i);
    double margin = w[d];
    for (std::size_t k = 0; k < d; ++k) margin += w[k] * x[k];
    margin *= y;

    const double eta = 1.0 / (lambda * static_cast<double>(t));
    const double shrink = 1.0 - 1.0 / static_cast<double>(t);
    for (double& wk : w) wk *= shrink;
    if (margin < 1.0) {
      for (std::size_t k = 0; k < d; ++k) w[k] += eta * y * x[k];
      w[d] += eta * y;
    }
    double norm2 = 0.0;
    for (double wk : w) norm2 += wk * wk;
    if (norm2 > radius * radius) {
      const double f = radius / std::sqrt(norm2);
      for (double& wk : w) wk *= f;
    }
    if (t >= tail_start) {
      for (std::size_t k = 0; k <= d; ++k) avg[k] += w[k];
      ++averaged;
    }
  }
  LinearModel m;
  m.weights.resize(d);
  for (std::size_t k = 0; k < d; ++k) m.weights[k] = avg[k] / static_cast<double>(averaged);
  m.bias = avg[d] / static_cast<double>(averaged);
  return m;
}

double svm_objective(const LinearModel& model, const LabeledDataset& data, double lambda) {
  double norm2 = model.bias * model.bias;
  for (double w : model.weights) norm2 += w * w;
  double hinge = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    hinge += std::max(0.0, 1.0 - data.label(i) * model.decision(data.vector(i)));
  }
  return 0.5 * lambda * norm2 + (data.size() ? hinge / static_cast<double>(data.size()) : 0.0);
}

double accuracy(const LinearModel& model, const LabeledDataset& data) {
  if (data.size() == 0) return 0.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    correct += model.predict(data.vector(i)) == data.label(i);
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

CrossValidationReport cross_validate(const LabeledDataset& data, std::size_t folds,
                                     const SvmOptions& options) {
  if (folds < 2) throw ArgumentError("cross_validate: folds must be >= 2");
  if (folds > data.size()) {
    throw ArgumentError("cross_validate: " + std::to_string(folds) + " folds for " +
                        std::to_string(data.size()) + " samples");
  }
  const std::size_t smallest = std::min(data.count(1), data.count(-1));
  if (smallest < 2) {
    throw ArgumentError("cross_validate: each class needs at least 2 samples");
  }
  CrossValidationReport report;
  report.folds_requested = folds;
  if (smallest < folds) {
    report.warnings.push_back("folds reduced from " + std::to_string(folds) + " to " +
                              std::to_string(smallest) + " (smallest class size)");
    folds = smallest;
  }
  report.folds_used = folds;

  std::vector<std::size_t> fold_of(data.size());
  Rng rng(options.seed);
  std::size_t deal = 0;
  for (int label : {1, -1}) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (data.label(i) == label) members.push_back(i);
    }
    rng.shuffle(std::span<std::size_t>(members));
    for (std::size_t i : members) fold_of[i] = deal++ % folds;
  }

  for (std::size_t f = 0; f < folds; ++f) {
    std::vector<std::size_t> train, test;
    for (std::size_t i = 0; i < data.size(); ++i) (fold_of[i] == f ? test : train).push_back(i);
    SvmOptions fold_options = options;
    fold_options.seed = derive_seed(options.seed, f);
    const LinearModel model = train_svm(data.subset(train), fold_options);
    report.fold_accuracies.push_back(accuracy(model, data.subset(test)));
  }
  report.mean_accuracy =
      std::accumulate(report.fold_accuracies.begin(), report.fold_accuracies.end(), 0.0) /
      static_cast<double>(folds);
  return report;
}

std::string model_json(const LinearModel& m, const SvmOptions& options) {
  nlohmann::ordered_json j;
  j["weights"] = m.weights;
  j["bias"] = m.bias;
  j["lambda"] = options.lambda;
  j["epochs"] = options.epochs;
  j["seed"] = options.seed;
  return j.dump() + "\n";
}

std::string cv_report_json(const CrossValidationReport& r) {
  nlohmann::ordered_json j;
  j["fold_accuracies"] = r.fold_accuracies;
  j["mean_accuracy"] = r.mean_accuracy;
  j["folds_requested"] = r.folds_requested;
  j["folds_used"] = r.folds_used;
  j["warnings"] = r.warnings;
  return j.dump(2) + "\n";
}

}  // namespace tda
