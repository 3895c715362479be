#include "tda/complex.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "oracles.hpp"
#include "tda/error.hpp"

namespace tda {
namespace {

const PointCloud kSquare(2, {0, 0, 1, 0, 1, 1, 0, 1});

std::vector<Vertex> verts(const Filtration& f, std::size_t i) {
  const auto s = f.simplex(i);
  return {s.begin(), s.end()};
}

double diameter(const DistanceMatrix& dm, std::span<const Vertex> s) {
  double d = 0;
  for (Vertex a : s) {
    for (Vertex b : s) d = std::max(d, dm(a, b));
  }
  return d;
}

TEST(Simplex, SortsAndRejectsDuplicates) {
  const Simplex s{3, 1, 2};
  EXPECT_EQ(std::vector<Vertex>(s.vertices().begin(), s.vertices().end()),
            (std::vector<Vertex>{1, 2, 3}));
  EXPECT_EQ(s.dim(), 2u);
  EXPECT_THROW(Simplex({1, 1}), ArgumentError);
  EXPECT_THROW(Simplex(std::vector<Vertex>{}), ArgumentError);
  EXPECT_LT(Simplex({0, 1}), Simplex({0, 2}));
}

TEST(Filtration, ValidatesInvariants) {
  using S = std::vector<std::pair<Simplex, double>>;
  EXPECT_NO_THROW(Filtration::from_simplices(S{{Simplex{0}, 0}, {Simplex{1}, 0}, {Simplex{0, 1}, 1}}));
  // Face after coface.
  EXPECT_THROW(Filtration::from_simplices(S{{Simplex{0}, 0}, {Simplex{0, 1}, 1}, {Simplex{1}, 1}}),
               InconsistentFiltrationError);
  // Decreasing values.
  EXPECT_THROW(Filtration::from_simplices(S{{Simplex{0}, 1}, {Simplex{1}, 0}}),
               InconsistentFiltrationError);
  // Duplicate.
  EXPECT_THROW(Filtration::from_simplices(S{{Simplex{0}, 0}, {Simplex{0}, 0}}),
               InconsistentFiltrationError);
  // Negative and NaN values.
  EXPECT_THROW(Filtration::from_simplices(S{{Simplex{0}, -1}}), InconsistentFiltrationError);
  EXPECT_THROW(Filtration::from_simplices(S{{Simplex{0}, std::nan("")}}), InconsistentFiltrationError);
  EXPECT_EQ(Filtration().max_dim(), -1);
}

TEST(VietorisRips, TwoPoints) {
  const auto f = vietoris_rips(pairwise_distances(PointCloud(1, {0, 1})), 1, 2);
  ASSERT_EQ(f.size(), 3u);
  EXPECT_EQ(verts(f, 0), (std::vector<Vertex>{0}));
  EXPECT_EQ(verts(f, 1), (std::vector<Vertex>{1}));
  EXPECT_EQ(verts(f, 2), (std::vector<Vertex>{0, 1}));
  EXPECT_EQ(f.value(0), 0.0);
  EXPECT_EQ(f.value(1), 0.0);
  EXPECT_EQ(f.value(2), 1.0);
}

TEST(VietorisRips, UnitSquareMatchesSubsetEnumeration) {
  const auto dm = pairwise_distances(kSquare);
  const auto f = vietoris_rips(dm, 2, 2);
  std::map<std::pair<std::size_t, double>, int> counts;
  for (std::size_t i = 0; i < f.size(); ++i) ++counts[{f.dim(i), f.value(i)}];
  EXPECT_EQ((counts[{0, 0.0}]), 4);
  EXPECT_EQ((counts[{1, 1.0}]), 4);
  EXPECT_EQ((counts[{1, std::sqrt(2.0)}]), 2);
  EXPECT_EQ((counts[{2, std::sqrt(2.0)}]), 4);
  EXPECT_EQ(f.size(), 14u);

  // Every subset of size <= 3, with its diameter, is present exactly once.
  std::size_t subsets = 0;
  for (unsigned mask = 1; mask < 16; ++mask) {
    if (__builtin_popcount(mask) > 3) continue;
    std::vector<Vertex> s;
    for (Vertex v = 0; v < 4; ++v) {
      if (mask & (1u << v)) s.push_back(v);
    }
    ++subsets;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (verts(f, i) == s) {
        ++hits;
        EXPECT_EQ(f.value(i), diameter(dm, s));
      }
    }
    EXPECT_EQ(hits, 1u);
  }
  EXPECT_EQ(subsets, f.size());
}

TEST(VietorisRips, ZeroThresholdGivesVerticesOnly) {
  const auto f = vietoris_rips(pairwise_distances(oracle::random_cloud(9, 2, 3)), 3, 0.0);
  EXPECT_EQ(f.size(), 9u);
  EXPECT_EQ(f.max_dim(), 0);
}

TEST(VietorisRips, ArgumentErrors) {
  const auto dm = pairwise_distances(kSquare);
  EXPECT_THROW(vietoris_rips(dm, -1, 1.0), ArgumentError);
  EXPECT_THROW(vietoris_rips(dm, 2, -1.0), ArgumentError);
  EXPECT_THROW(vietoris_rips(dm, 2, std::nan("")), ArgumentError);
}

TEST(VietorisRips, InvariantsOnRandomClouds) {
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    const auto dm = pairwise_distances(oracle::random_cloud(10, 2, seed));
    const double cap = 0.3 + 0.05 * static_cast<double>(seed);
    const auto f = vietoris_rips(dm, 3, cap);
    EXPECT_NO_THROW(f.validate());
    std::map<std::vector<Vertex>, double> value_of;
    for (std::size_t i = 0; i < f.size(); ++i) {
      const auto s = verts(f, i);
      EXPECT_LE(f.value(i), cap);
      EXPECT_EQ(f.value(i), diameter(dm, s));
      if (s.size() > 2) {
        // From triangles up, the value is the max over facets.
        double facet_max = 0;
        for (std::size_t drop = 0; drop < s.size(); ++drop) {
          auto face = s;
          face.erase(face.begin() + static_cast<std::ptrdiff_t>(drop));
          facet_max = std::max(facet_max, value_of.at(face));
        }
        EXPECT_EQ(f.value(i), facet_max);
      }
      value_of[s] = f.value(i);
      if (i > 0) {
        // (value, dim, lex) order.
        const auto prev = verts(f, i - 1);
        const auto key = std::tuple(f.value(i - 1), prev.size(), prev);
        EXPECT_LT(key, std::tuple(f.value(i), s.size(), s));
      }
    }
    // Completeness: every clique of size <= 4 under the cap is present.
    std::size_t expected = 0;
    for (unsigned mask = 1; mask < (1u << 10); ++mask) {
      if (__builtin_popcount(mask) > 4) continue;
      std::vector<Vertex> s;
      for (Vertex v = 0; v < 10; ++v) {
        if (mask & (1u << v)) s.push_back(v);
      }
      expected += diameter(dm, s) <= cap;
    }
    EXPECT_EQ(f.size(), expected);
  }
}

TEST(VietorisRips, LargerThresholdExtendsAsPrefix) {
  const auto dm = pairwise_distances(oracle::random_cloud(12, 3, 8));
  const auto small = vietoris_rips(dm, 2, 0.5);
  const auto big = vietoris_rips(dm, 2, 0.9);
  ASSERT_LE(small.size(), big.size());
  for (std::size_t i = 0; i < small.size(); ++i) {
    EXPECT_EQ(verts(small, i), verts(big, i));
    EXPECT_EQ(small.value(i), big.value(i));
  }
  EXPECT_GT(big.value(small.size()), 0.5);
}

TEST(EnclosingRadius, MinOfRowMaxima) {
  const auto dm = pairwise_distances(PointCloud(1, {0, 1, 3}));
  EXPECT_EQ(enclosing_radius(dm), 2.0);
  EXPECT_EQ(enclosing_radius(pairwise_distances(PointCloud(1, {5}))), 0.0);
}

TEST(FiltrationCsv, Format) {
  const auto f = vietoris_rips(pairwise_distances(PointCloud(1, {0, 1})), 1, 2);
  EXPECT_EQ(filtration_csv(f), "0,0,0\n0,0,1\n1,1,0 1\n");
}

TEST(CechMembership, TangentBalls) {
  const PointCloud c(1, {0, 2});
  EXPECT_TRUE(cech_membership(c, Simplex{0, 1}, 1.0));
  EXPECT_FALSE(cech_membership(c, Simplex{0, 1}, 0.999));
}

TEST(CechMembership, EquilateralTriangle) {
  const PointCloud c(2, {0, 0, 1, 0, 0.5, std::sqrt(3.0) / 2});
  const std::vector<Vertex> all{0, 1, 2};
  EXPECT_FALSE(cech_membership(c, Simplex{0, 1, 2}, 0.5));
  EXPECT_TRUE(cech_membership(c, Simplex{0, 1, 2}, 0.578));
  const double expected = 1 / std::sqrt(3.0);
  EXPECT_NEAR(smallest_enclosing_ball(c, all).radius, expected, 1e-12);
  EXPECT_NEAR(oracle::brute_force_enclosing_radius(c, all), expected, 1e-12);
}

TEST(CechMembership, VertexAtZero) {
  EXPECT_TRUE(cech_membership(kSquare, Simplex{2}, 0.0));
}

TEST(CechMembership, DimensionLimit) {
  const PointCloud c(4, {0, 0, 0, 0, 1, 1, 1, 1});
  EXPECT_THROW(cech_membership(c, Simplex{0, 1}, 1.0), UnsupportedDimensionError);
  EXPECT_THROW(cech_complex(c, 1.0, 1), ScopeError);
}

TEST(SmallestEnclosingBall, MatchesBruteForce) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const std::size_t dim = 1 + seed % 3;
    const auto c = oracle::random_cloud(6, dim, seed);
    std::vector<Vertex> all{0, 1, 2, 3, 4, 5};
    for (std::size_t k = 1; k <= 6; ++k) {
      const std::span<const Vertex> s(all.data(), k);
      const Ball b = smallest_enclosing_ball(c, s);
      EXPECT_NEAR(b.radius, oracle::brute_force_enclosing_radius(c, s), 1e-9) << seed << " " << k;
      for (Vertex v : s) {
        double d2 = 0;
        for (std::size_t i = 0; i < dim; ++i) d2 += std::pow(c.point(v)[i] - b.center[i], 2);
        EXPECT_LE(std::sqrt(d2), b.radius * (1 + 1e-9) + 1e-12);
      }
    }
  }
}

TEST(SmallestEnclosingBall, DegenerateSupports) {
  // Collinear triple and repeated points.
  const PointCloud line(2, {0, 0, 1, 1, 2, 2});
  EXPECT_NEAR(smallest_enclosing_ball(line, std::vector<Vertex>{0, 1, 2}).radius, std::sqrt(2.0), 1e-12);
  const PointCloud twins(3, {1, 1, 1, 1, 1, 1, 3, 1, 1});
  EXPECT_NEAR(smallest_enclosing_ball(twins, std::vector<Vertex>{0, 1, 2}).radius, 1.0, 1e-12);
}

TEST(CechComplex, SmallRadiusGivesVertices) {
  const auto c = oracle::random_cloud(8, 2, 4);
  const auto dm = pairwise_distances(c);
  double min_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < 8; ++i) {
    for (std::size_t j = i + 1; j < 8; ++j) min_d = std::min(min_d, dm(i, j));
  }
  const auto cx = cech_complex(c, 0.49 * min_d, 3);
  EXPECT_EQ(cx.size(), 8u);
}

TEST(CechComplex, LargeRadiusGivesFullSimplex) {
  const auto c = oracle::random_cloud(7, 3, 5);
  std::vector<Vertex> all{0, 1, 2, 3, 4, 5, 6};
  const double r = smallest_enclosing_ball(c, all).radius;
  const auto cx = cech_complex(c, r * 1.0001, 2);
  EXPECT_EQ(cx.size(), 7u + 21u + 35u);
  EXPECT_TRUE(std::is_sorted(cx.begin(), cx.end(), [](const Simplex& a, const Simplex& b) {
    return std::pair(a.dim(), a) < std::pair(b.dim(), b);
  }));
}

TEST(CechComplex, UnitSquareHalfRadius) {
  const auto cx = cech_complex(kSquare, 0.5, 2);
  std::vector<Simplex> expected{Simplex{0}, Simplex{1}, Simplex{2}, Simplex{3},
                                Simplex{0, 1}, Simplex{0, 3}, Simplex{1, 2}, Simplex{2, 3}};
  EXPECT_EQ(cx, expected);
  EXPECT_EQ(cech_complex(kSquare, std::sqrt(0.5), 2).size(), 4u + 6u + 4u);
}

TEST(CechComplex, ScopeLimit) {
  EXPECT_THROW(cech_complex(oracle::random_cloud(33, 2, 1), 0.1, 1), ScopeError);
}

TEST(CechComplex, SandwichesRips) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto c = oracle::random_cloud(8, 2, 50 + seed);
    const auto dm = pairwise_distances(c);
    for (double eps : {0.05, 0.2, 0.4}) {
      for (const Simplex& s : cech_complex(c, eps, 3)) {
        EXPECT_LE(diameter(dm, s.vertices()), 2 * eps * (1 + 1e-9));
      }
      const auto rips = vietoris_rips(dm, 3, 2 * eps);
      const auto cech2 = cech_complex(c, 2 * eps, 3);
      for (std::size_t i = 0; i < rips.size(); ++i) {
        EXPECT_TRUE(std::binary_search(cech2.begin(), cech2.end(), Simplex(verts(rips, i)),
                                       [](const Simplex& a, const Simplex& b) {
                                         return std::pair(a.dim(), a) < std::pair(b.dim(), b);
                                       }));
      }
    }
  }
}

}  // namespace
}  // namespace tda
