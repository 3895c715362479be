#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tda/complex.hpp"

namespace tda {

/// Z/2 boundary matrix of a filtration. Column j lists, in ascending order,
/// the filtration positions of the codimension-1 faces of simplex j; every
/// entry is below j.
struct BoundaryMatrix {
  std::vector<std::vector<std::uint32_t>> columns;
  std::vector<std::uint32_t> dims;  // dimension of the simplex of each column

  std::size_t size() const noexcept { return columns.size(); }
};

/// Throws InconsistentFiltrationError if a face is missing or comes later.
BoundaryMatrix boundary_matrix(const Filtration& filtration);

struct ReduceOptions {
  /// Reduce dimensions top-down and zero out columns already known to be
  /// births (the pivots of the dimension above). Output is unchanged.
  bool clearing = true;
  /// Let diagrams() reduce the anti-transposed matrix instead; the pairs
  /// are identical and VR filtrations usually reduce much faster this way.
  bool dual = false;
};

struct Reduction {
  BoundaryMatrix reduced;
  /// (birth position, death position), ascending by birth.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  /// Positions of simplices that create a class which never dies.
  std::vector<std::size_t> essentials;
};

/// Standard left-to-right column reduction over Z/2.
Reduction reduce(BoundaryMatrix matrix, ReduceOptions options = {});

/// Reduction of the anti-transposed matrix (persistent cohomology). The
/// pairs and essentials are reported in the original positions and equal
/// those of reduce(); `reduced` holds the reduced coboundary matrix, whose
/// column n-1-i belongs to simplex i. Dimensions go bottom-up, so clearing
/// skips the columns of simplices already known to be deaths.
Reduction reduce_dual(const BoundaryMatrix& matrix, ReduceOptions options = {});

struct PersistencePair {
  double birth = 0.0;
  double death = 0.0;

  double persistence() const noexcept { return death - birth; }
  friend auto operator<=>(const PersistencePair&, const PersistencePair&) = default;
};

/// Multiset of finite (birth, death) points with birth < death, plus the
/// births of essential classes (death = +inf). Both lists are kept sorted.
class PersistenceDiagram {
 public:
  explicit PersistenceDiagram(int degree = 0) : degree_(degree) {}
  /// Throws ArgumentError on a negative degree, a point with death <= birth,
  /// or a non-finite birth.
  PersistenceDiagram(int degree, std::vector<PersistencePair> points,
                     std::vector<double> essentials = {});

  int degree() const noexcept { return degree_; }
  std::span<const PersistencePair> points() const noexcept { return points_; }
  std::span<const double> essentials() const noexcept { return essentials_; }
  bool empty() const noexcept { return points_.empty() && essentials_.empty(); }

  friend bool operator==(const PersistenceDiagram&,
                         const PersistenceDiagram&) = default;

 private:
  int degree_;
  std::vector<PersistencePair> points_;
  std::vector<double> essentials_;
};

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Diagrams for degrees 0..max_degree. Births and deaths are filtration
/// values of the paired simplices; zero-persistence pairs are dropped.
/// Simplices above dimension max_degree + 1 are ignored.
std::vector<PersistenceDiagram> diagrams(const Filtration& filtration,
                                         int max_degree,
                                         ReduceOptions options = {});

/// Number of classes alive at eps: birth <= eps < death.
int betti_number(const PersistenceDiagram& diagram, double eps);

/// Rank of H_p(R_s) -> H_p(R_t): classes with birth <= s and death > t.
/// Throws ArgumentError when s > t.
int persistent_betti(const PersistenceDiagram& diagram, double s, double t);

/// Persistent Betti numbers on a grid, beta(i, j) for grid indices i <= j.
using BettiTable = std::function<int(std::size_t i, std::size_t j)>;

/// mu_i^j = beta_{i-1}^j - beta_i^j + beta_i^{j-1} - beta_{i-1}^{j-1},
/// for 0 < i < j <= m. Throws ArgumentError otherwise.
int multiplicity(const BettiTable& beta, std::size_t i, std::size_t j,
                 std::size_t m);

/// Same, with beta evaluated from the diagram on the given strictly
/// increasing grid eps_0 < ... < eps_m.
int multiplicity(const PersistenceDiagram& diagram, std::size_t i, std::size_t j,
                 std::span<const double> grid);

/// Multiplies every birth and death by factor (e.g. 0.5 for the radius scale).
PersistenceDiagram rescale(const PersistenceDiagram& diagram, double factor);

/// `degree,birth,death` per line, `inf` for essential deaths, sorted by
/// (degree, birth, death).
std::string diagrams_csv(std::span<const PersistenceDiagram> diagrams);

/// Inverse of diagrams_csv. The result has one diagram per degree from 0 to
/// the largest degree present (or `min_degrees - 1` if larger).
std::vector<PersistenceDiagram> parse_diagrams_csv(std::istream& in,
                                                   std::size_t min_degrees = 0);

/// Finite points as `birth,death` rows, for scatter plots.
std::string diagram_scatter_csv(const PersistenceDiagram& diagram);

}  // namespace tda
