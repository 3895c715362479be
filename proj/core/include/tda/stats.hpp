#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tda/summaries.hpp"

namespace tda {

enum class TestStatistic { l2_mean_diff, sup_mean_diff };

std::string to_string(TestStatistic s);
/// Accepts "l2" / "l2_mean_diff" and "sup" / "sup_mean_diff".
TestStatistic parse_test_statistic(const std::string& name);

struct PermutationTestOptions {
  TestStatistic statistic = TestStatistic::l2_mean_diff;
  std::size_t n_permutations = 9999;  // Monte Carlo draws
  std::uint64_t seed = 0;
  /// Enumerate every split when C(n_a + n_b, n_a) does not exceed this.
  std::uint64_t exhaustive_threshold = 200000;
};

struct PermutationTestResult {
  double observed_statistic = 0.0;
  double p_value = 1.0;
  /// Splits evaluated: all of them when exhaustive, else the Monte Carlo draws.
  std::uint64_t n_permutations = 0;
  bool exhaustive = false;
  std::uint64_t seed = 0;
  TestStatistic statistic = TestStatistic::l2_mean_diff;
};

/// Relabeling test for a difference in group means.
///
/// The statistic is a norm of mean(A) - mean(B). Splits keep the original
/// group sizes. A split ties the observed value when its score (the squared
/// norm for L2, the norm for sup) is within a relative 1e-9 of it plus 1e-12
/// of the data scale; ties count toward the p-value.
///   exhaustive:  p = #{splits >= observed} / C(n_a + n_b, n_a)
///   Monte Carlo: p = (1 + #{draws >= observed}) / (1 + N)
///
/// Throws ArgumentError for an empty group, unequal vector lengths, or
/// n_permutations == 0.
PermutationTestResult permutation_test(std::span<const FeatureVector> group_a,
                                       std::span<const FeatureVector> group_b,
                                       const PermutationTestOptions& options = {});

/// C(n, k), saturating at UINT64_MAX.
std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

struct Exclusion {
  enum class Mode { drop_death_coords, drop_landscape_functions };
  Mode mode = Mode::drop_death_coords;
  std::size_t count = 0;
};

std::string to_string(const Exclusion& e);

/// Removes the leading death coordinates, or the leading lambda_k blocks of
/// (m + 1) grid values, from every vector. Throws ArgumentError when a
/// vector has the wrong kind or fewer coordinates/functions than requested.
std::vector<FeatureVector> preprocess_exclusion(std::span<const FeatureVector> vectors,
                                                const Exclusion& exclusion);

/// `{statistic, p_value, n_permutations, exhaustive, seed, statistic_name,
/// exclusions}`.
std::string permutation_result_json(const PermutationTestResult& r,
                                    std::span<const Exclusion> exclusions);

}  // namespace tda
