#include "tda/stats.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <numeric>

#include "tda/error.hpp"
#include "tda/random.hpp"

namespace tda {

std::string to_string(TestStatistic s) {
  return s == TestStatistic::l2_mean_diff ? "l2_mean_diff" : "sup_mean_diff";
}

TestStatistic parse_test_statistic(const std::string& name) {
  if (name == "l2" || name == "l2_mean_diff") return TestStatistic::l2_mean_diff;
  if (name == "sup" || name == "sup_mean_diff") return TestStatistic::sup_mean_diff;
  throw ArgumentError("unknown test statistic '" + name + "'");
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t c = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    // c * (n - k + i) / i is exact; split the division so nothing overflows.
    const std::uint64_t g = std::gcd(c, i);
    const std::uint64_t factor = (n - k + i) / (i / g);
    if (c / g > UINT64_MAX / factor) return UINT64_MAX;
    c = (c / g) * factor;
  }
  return c;
}

namespace {

// Everything the split statistics need, computed once from the pooled data.
// Vectors are centred on the pooled mean; the statistic is unchanged by the
// shift and the Gram entries stay small relative to the differences.
class SplitEvaluator {
 public:
  SplitEvaluator(std::span<const FeatureVector> a, std::span<const FeatureVector> b,
                 TestStatistic statistic)
      : statistic_(statistic), na_(a.size()), nb_(b.size()), n_(na_ + nb_) {
    len_ = a.front().size();
    data_.reserve(n_);
    for (const auto& v : a) data_.push_back(v.values);
    for (const auto& v : b) data_.push_back(v.values);
    for (const auto& v : data_) {
      if (v.size() != len_) throw ArgumentError("permutation_test: vector lengths differ");
    }
    std::vector<double> mean(len_, 0.0);
    for (const auto& v : data_) {
      for (std::size_t k = 0; k < len_; ++k) mean[k] += v[k];
    }
    for (double& m : mean) m /= static_cast<double>(n_);
    for (auto& v : data_) {
      for (std::size_t k = 0; k < len_; ++k) v[k] -= mean[k];
    }
    total_.assign(len_, 0.0);
    for (const auto& v : data_) {
      for (std::size_t k = 0; k < len_; ++k) total_[k] += v[k];
    }
    if (statistic_ == TestStatistic::l2_mean_diff) {
      gram_.assign(n_ * n_, 0.0);
      for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = i; j < n_; ++j) {
          double dot = 0.0;
          for (std::size_t k = 0; k < len_; ++k) dot += data_[i][k] * data_[j][k];
          gram_[i * n_ + j] = gram_[j * n_ + i] = dot;
        }
      }
      row_sum_.assign(n_, 0.0);
      for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = 0; j < n_; ++j) row_sum_[i] += gram_[i * n_ + j];
        grand_ += row_sum_[i];
        max_gram_diag_ = std::max(max_gram_diag_, gram_[i * n_ + i]);
      }
    }
    double scale = 0.0;
    for (const auto& v : data_) {
      double s = 0.0;
      for (double x : v) s = std::max(s, std::abs(x));
      scale = std::max(scale, s);
    }
    scale_ = scale;
  }

  std::size_t na() const { return na_; }
  std::size_t n() const { return n_; }
  TestStatistic statistic() const { return statistic_; }

  // Splits are compared on a score: the squared norm for L2 (cancellation
  // noise stays near machine precision there), the norm itself for sup.
  double statistic_of(double score) const {
    return statistic_ == TestStatistic::l2_mean_diff ? std::sqrt(score) : score;
  }

  // Smallest score that still counts as reaching the observed one.
  double threshold(double observed_score) const {
    const double slack = statistic_ == TestStatistic::l2_mean_diff
                             ? 1e-12 * max_gram_diag_
                             : 1e-12 * scale_;
    return observed_score - (1e-9 * observed_score + slack);
  }

  // ||mean_A - mean_B||^2 from the within-A Gram sum and the A row sums.
  double l2_from_sums(double within, double rows) const {
    const double a = static_cast<double>(na_);
    const double b = static_cast<double>(nb_);
    const double cross = rows - within;
    const double outside = grand_ - 2.0 * rows + within;
    const double sq = within / (a * a) - 2.0 * cross / (a * b) + outside / (b * b);
    return std::max(sq, 0.0);
  }

  double sup_from_sum(std::span<const double> sum_a) const {
    const double a = static_cast<double>(na_);
    const double b = static_cast<double>(nb_);
    double best = 0.0;
    for (std::size_t k = 0; k < len_; ++k) {
      best = std::max(best, std::abs(sum_a[k] / a - (total_[k] - sum_a[k]) / b));
    }
    return best;
  }

  // Score of the split whose A-group is `members`.
  double score(std::span<const std::size_t> members) const {
    if (statistic_ == TestStatistic::l2_mean_diff) {
      double within = 0.0, rows = 0.0;
      for (std::size_t i : members) {
        rows += row_sum_[i];
        for (std::size_t j : members) within += gram_[i * n_ + j];
      }
      return l2_from_sums(within, rows);
    }
    std::vector<double> sum(len_, 0.0);
    for (std::size_t i : members) {
      for (std::size_t k = 0; k < len_; ++k) sum[k] += data_[i][k];
    }
    return sup_from_sum(sum);
  }

  // Calls visit(score) once for every na-subset of the pooled indices.
  template <class Visit>
  void enumerate(Visit&& visit) const {
    if (statistic_ == TestStatistic::l2_mean_diff) {
      std::vector<std::vector<double>> acc(na_ + 1, std::vector<double>(n_, 0.0));
      enumerate_l2(0, 0, 0.0, 0.0, acc, visit);
    } else {
      std::vector<std::vector<double>> acc(na_ + 1, std::vector<double>(len_, 0.0));
      enumerate_sup(0, 0, acc, visit);
    }
  }

 private:
  // acc[depth][j] = sum over chosen i of G_ij.
  template <class Visit>
  void enumerate_l2(std::size_t start, std::size_t depth, double within, double rows,
                    std::vector<std::vector<double>>& acc, Visit& visit) const {
    if (depth == na_) {
      visit(l2_from_sums(within, rows));
      return;
    }
    const std::size_t last = n_ - (na_ - depth);
    for (std::size_t i = start; i <= last; ++i) {
      const double w = within + 2.0 * acc[depth][i] + gram_[i * n_ + i];
      auto& next = acc[depth + 1];
      const double* g = gram_.data() + i * n_;
      for (std::size_t j = 0; j < n_; ++j) next[j] = acc[depth][j] + g[j];
      enumerate_l2(i + 1, depth + 1, w, rows + row_sum_[i], acc, visit);
    }
  }

  template <class Visit>
  void enumerate_sup(std::size_t start, std::size_t depth,
                     std::vector<std::vector<double>>& acc, Visit& visit) const {
    if (depth == na_) {
      visit(sup_from_sum(acc[depth]));
      return;
    }
    const std::size_t last = n_ - (na_ - depth);
    for (std::size_t i = start; i <= last; ++i) {
      auto& next = acc[depth + 1];
      for (std::size_t k = 0; k < len_; ++k) next[k] = acc[depth][k] + data_[i][k];
      enumerate_sup(i + 1, depth + 1, acc, visit);
    }
  }

  TestStatistic statistic_;
  std::size_t na_, nb_, n_, len_ = 0;
  std::vector<std::vector<double>> data_;
  std::vector<double> total_;
  std::vector<double> gram_;
  std::vector<double> row_sum_;
  double grand_ = 0.0;
  double max_gram_diag_ = 0.0;
  double scale_ = 0.0;
};

constexpr std::size_t kMonteCarloBlock = 1024;

}  // namespace

PermutationTestResult permutation_test(std::span<const FeatureVector> group_a,
                                       std::span<const FeatureVector> group_b,
                                       const PermutationTestOptions& options) {
  if (group_a.empty() || group_b.empty()) {
    throw ArgumentError("permutation_test: both groups must be nonempty");
  }
  if (options.n_permutations < 1) {
    throw ArgumentError("permutation_test: n_permutations must be >= 1");
  }
  const SplitEvaluator eval(group_a, group_b, options.statistic);

  PermutationTestResult result;
  result.seed = options.seed;
  result.statistic = options.statistic;
  std::vector<std::size_t> observed_members(eval.na());
  std::iota(observed_members.begin(), observed_members.end(), std::size_t{0});
  const double observed = eval.score(observed_members);
  result.observed_statistic = eval.statistic_of(observed);
  const double threshold = eval.threshold(observed);

  const std::uint64_t splits = binomial(eval.n(), eval.na());
  if (splits <= options.exhaustive_threshold) {
    std::uint64_t hits = 0;
    eval.enumerate([&](double s) { hits += (s >= threshold); });
    result.exhaustive = true;
    result.n_permutations = splits;
    result.p_value = static_cast<double>(hits) / static_cast<double>(splits);
    return result;
  }

  // Each block of draws has its own derived stream, so the result does not
  // depend on how blocks are scheduled.
  std::uint64_t hits = 0;
  std::vector<std::size_t> labels(eval.n());
  const std::size_t total = options.n_permutations;
  for (std::size_t block = 0; block * kMonteCarloBlock < total; ++block) {
    Rng rng(derive_seed(options.seed, block));
    const std::size_t count = std::min(kMonteCarloBlock, total - block * kMonteCarloBlock);
    for (std::size_t r = 0; r < count; ++r) {
      std::iota(labels.begin(), labels.end(), std::size_t{0});
      rng.shuffle(std::span<std::size_t>(labels));
      const std::span<const std::size_t> members(labels.data(), eval.na());
      hits += (eval.score(members) >= threshold);
    }
  }
  result.exhaustive = false;
  result.n_permutations = total;
  result.p_value = static_cast<double>(1 + hits) / static_cast<double>(1 + total);
  return result;
}

std::string to_string(const Exclusion& e) {
  const char* name = e.mode == Exclusion::Mode::drop_death_coords
                         ? "drop_death_coords"
                         : "drop_landscape_functions";
  return std::string(name) + "(" + std::to_string(e.count) + ")";
}

std::vector<FeatureVector> preprocess_exclusion(std::span<const FeatureVector> vectors,
                                                const Exclusion& exclusion) {
  std::vector<FeatureVector> out;
  out.reserve(vectors.size());
  const std::size_t k = exclusion.count;
  for (const auto& v : vectors) {
    FeatureVector r = v;
    if (exclusion.mode == Exclusion::Mode::drop_death_coords) {
      if (v.kind != FeatureKind::death) {
        throw ArgumentError("drop_death_coords applies to death vectors only");
      }
      if (k > v.size()) {
        throw ArgumentError("cannot drop " + std::to_string(k) +
                            " death coordinates from a vector of length " +
                            std::to_string(v.size()));
      }
      r.values.erase(r.values.begin(), r.values.begin() + static_cast<std::ptrdiff_t>(k));
    } else {
      if (v.kind != FeatureKind::landscape || !v.grid) {
        throw ArgumentError("drop_landscape_functions needs landscape grid vectors");
      }
      const auto& g = *v.grid;
      if (k > g.functions) {
        throw ArgumentError("cannot drop " + std::to_string(k) + " of " +
                            std::to_string(g.functions) + " landscape functions");
      }
      if (v.size() != g.length()) throw ArgumentError("landscape vector/grid mismatch");
      r.values.erase(r.values.begin(),
                     r.values.begin() + static_cast<std::ptrdiff_t>(k * g.points()));
      r.grid->functions -= k;
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::string permutation_result_json(const PermutationTestResult& r,
                                    std::span<const Exclusion> exclusions) {
  nlohmann::ordered_json j;
  j["statistic"] = r.observed_statistic;
  j["p_value"] = r.p_value;
  j["n_permutations"] = r.n_permutations;
  j["exhaustive"] = r.exhaustive;
  j["seed"] = r.seed;
  j["statistic_name"] = to_string(r.statistic);
  nlohmann::ordered_json ex = nlohmann::ordered_json::array();
  for (const auto& e : exclusions) ex.push_back(to_string(e));
  j["exclusions"] = ex;
  return j.dump(2) + "\n";
}

}  // namespace tda
