#pragma once

// Lookup from vertex lists to filtration positions, keyed by the
// combinatorial number system: a sorted list v_0 < ... < v_k encodes to
// sum_i C(v_i, i + 1), which is unique within one dimension.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <unordered_map>
#include <vector>

#include "tda/complex.hpp"
#include "tda/error.hpp"

namespace tda::detail {

class BinomialTable {
 public:
  // Coefficients C(n, k) for n <= max_n, k <= max_k; saturates at UINT64_MAX.
  BinomialTable(std::size_t max_n, std::size_t max_k)
      : cols_(max_k + 1), table_((max_n + 1) * (max_k + 1), 0) {
    for (std::size_t n = 0; n <= max_n; ++n) {
      at(n, 0) = 1;
      for (std::size_t k = 1; k <= max_k; ++k) {
        if (n == 0) continue;
        const std::uint64_t a = at(n - 1, k - 1);
        const std::uint64_t b = at(n - 1, k);
        at(n, k) = (a > kMax - b) ? kMax : a + b;
      }
    }
  }

  std::uint64_t operator()(std::size_t n, std::size_t k) const {
    return table_[n * cols_ + k];
  }

  static constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();

 private:
  std::uint64_t& at(std::size_t n, std::size_t k) { return table_[n * cols_ + k]; }

  std::size_t cols_;
  std::vector<std::uint64_t> table_;
};

class SimplexIndex {
 public:
  SimplexIndex(std::size_t vertex_bound, std::size_t max_dim)
      : binom_(vertex_bound + 1, max_dim + 1), maps_(max_dim + 1) {
    // Every key of dimension d is below C(vertex_bound, d + 1).
    for (std::size_t d = 0; d <= max_dim; ++d) {
      if (binom_(vertex_bound, d + 1) == BinomialTable::kMax) {
        throw ScopeError("simplex encoding overflows 64 bits");
      }
    }
  }

  std::uint64_t key(std::span<const Vertex> s) const {
    std::uint64_t k = 0;
    for (std::size_t i = 0; i < s.size(); ++i) k += binom_(s[i], i + 1);
    return k;
  }

  // Returns false if the simplex was already present.
  bool insert(std::span<const Vertex> s, std::size_t position) {
    return maps_[s.size() - 1].emplace(key(s), position).second;
  }

  // Position of the simplex, or npos.
  std::size_t find(std::span<const Vertex> s) const {
    const auto& m = maps_[s.size() - 1];
    const auto it = m.find(key(s));
    return it == m.end() ? npos : it->second;
  }

  void reserve(std::size_t dim, std::size_t count) { maps_[dim].reserve(count); }

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  BinomialTable binom_;
  std::vector<std::unordered_map<std::uint64_t, std::size_t>> maps_;
};

}  // namespace tda::detail
