#pragma once

// Independent reference implementations used only by the tests. None of
// them share code paths with the library routines they check.

#include <cstdint>
#include <span>
#include <vector>

#include "tda/complex.hpp"
#include "tda/persistence.hpp"
#include "tda/pointcloud.hpp"
#include "tda/summaries.hpp"

namespace tda::oracle {

/// Uniform random cloud in [0, 1)^dim.
PointCloud random_cloud(std::size_t n, std::size_t dim, std::uint64_t seed);

/// Distinct filtration values in increasing order.
std::vector<double> filtration_grid(const Filtration& f);

/// rank(H_p(K_s) -> H_p(K_t)) over Z/2, from explicit cycle and boundary
/// spaces of the subcomplexes with value <= s and <= t, by dense Gaussian
/// elimination.
int persistent_betti_rank(const Filtration& f, int degree, double s, double t);

/// Diagram of one degree rebuilt from persistent Betti ranks over the
/// filtration's value grid, through the multiplicity formula.
PersistenceDiagram diagram_from_ranks(const Filtration& f, int degree);

/// Single-linkage merge heights (finite H0 deaths) via union-find over the
/// sorted edge list, ascending.
std::vector<double> single_linkage_deaths(const DistanceMatrix& dm);

/// k-th largest tent value at t (0-based k), evaluated directly.
double kmax_tent(std::span<const PersistencePair> points, std::size_t k, double t);

/// Enclosing-ball radius by trying every support set of <= dim+1 points.
double brute_force_enclosing_radius(const PointCloud& cloud,
                                    std::span<const Vertex> vertices);

/// Exhaustive relabeling p-value with the L2 mean-difference statistic,
/// computed split by split from the raw vectors.
double brute_force_permutation_p(std::span<const std::vector<double>> a,
                                 std::span<const std::vector<double>> b);

}  // namespace tda::oracle
