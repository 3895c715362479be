#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tda/pointcloud.hpp"

namespace tda {

using Vertex = std::uint32_t;

/// Abstract simplex: strictly increasing vertex indices.
class Simplex {
 public:
  /// Sorts the vertices; throws ArgumentError on an empty list or duplicates.
  explicit Simplex(std::vector<Vertex> vertices);
  Simplex(std::initializer_list<Vertex> vertices)
      : Simplex(std::vector<Vertex>(vertices)) {}

  std::size_t dim() const noexcept { return vertices_.size() - 1; }
  std::span<const Vertex> vertices() const noexcept { return vertices_; }

  friend auto operator<=>(const Simplex&, const Simplex&) = default;

 private:
  std::vector<Vertex> vertices_;
};

/// Simplices with filtration values, in filtration order. Vertex lists are
/// packed into one buffer; simplex(i) is a view into it.
///
/// Invariants (checked by validate()): values nondecreasing, every face of a
/// simplex appears before it, no simplex appears twice.
class Filtration {
 public:
  Filtration() = default;

  /// Takes simplices in the given order and validates them. Throws
  /// InconsistentFiltrationError when an invariant fails.
  static Filtration from_simplices(
      const std::vector<std::pair<Simplex, double>>& simplices);

  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }
  std::span<const Vertex> simplex(std::size_t i) const {
    return {vertices_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }
  std::size_t dim(std::size_t i) const {
    return offsets_[i + 1] - offsets_[i] - 1;
  }
  double value(std::size_t i) const { return values_[i]; }
  std::span<const double> values() const noexcept { return values_; }

  /// Largest simplex dimension present, or -1 for an empty filtration.
  int max_dim() const noexcept;

  void validate() const;

  /// Appends without checking; callers are responsible for order.
  void push_back(std::span<const Vertex> simplex, double value);

 private:
  std::vector<Vertex> vertices_;
  std::vector<std::size_t> offsets_{0};
  std::vector<double> values_;
};

/// Vietoris-Rips filtration on the diameter scale: a simplex of dimension at
/// most max_dim is present iff its diameter is <= max_value, and enters at
/// its diameter (vertices at 0). Order is (value, dimension, vertex list).
/// max_value may be +inf.
Filtration vietoris_rips(const DistanceMatrix& dm, int max_dim, double max_value);

/// The smallest threshold at which the Rips complex is a cone on some vertex:
/// min over i of max over j of d(i, j). Beyond it no finite class can be born
/// or die, so truncating there leaves the diagrams unchanged.
double enclosing_radius(const DistanceMatrix& dm);

/// `value,dim,v0 v1 ... vk` per line, in filtration order.
std::string filtration_csv(const Filtration& f);

// Brute-force Cech complex, for checking the Rips construction on small
// inputs. Radius scale: a simplex is present iff the closed eps-balls around
// its vertices have a common point.

struct Ball {
  std::vector<double> center;
  double radius = 0.0;
};

/// Smallest enclosing ball by Welzl's recursion. Points in dimension <= 3.
Ball smallest_enclosing_ball(const PointCloud& cloud,
                             std::span<const Vertex> vertices);

/// Relative tolerance 1e-9 on the radius comparison. Cloud dimension <= 3.
bool cech_membership(const PointCloud& cloud, const Simplex& simplex, double eps);

/// All simplices up to max_dim, ordered by (dimension, vertex list).
/// Requires n <= 32 and dimension <= 3.
std::vector<Simplex> cech_complex(const PointCloud& cloud, double eps,
                                  int max_dim);

}  // namespace tda
