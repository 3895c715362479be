#include "tda/complex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "simplex_index.hpp"
#include "tda/error.hpp"
#include "tda/text.hpp"

namespace tda {

Simplex::Simplex(std::vector<Vertex> vertices) : vertices_(std::move(vertices)) {
  if (vertices_.empty()) throw ArgumentError("simplex needs at least one vertex");
  std::sort(vertices_.begin(), vertices_.end());
  if (std::adjacent_find(vertices_.begin(), vertices_.end()) != vertices_.end()) {
    throw ArgumentError("simplex has a repeated vertex");
  }
}

int Filtration::max_dim() const noexcept {
  int d = -1;
  for (std::size_t i = 0; i < size(); ++i) d = std::max(d, static_cast<int>(dim(i)));
  return d;
}

void Filtration::push_back(std::span<const Vertex> simplex, double value) {
  vertices_.insert(vertices_.end(), simplex.begin(), simplex.end());
  offsets_.push_back(vertices_.size());
  values_.push_back(value);
}

Filtration Filtration::from_simplices(
    const std::vector<std::pair<Simplex, double>>& simplices) {
  Filtration f;
  for (const auto& [s, v] : simplices) f.push_back(s.vertices(), v);
  f.validate();
  return f;
}

void Filtration::validate() const {
  if (empty()) return;
  Vertex max_vertex = 0;
  for (Vertex v : vertices_) max_vertex = std::max(max_vertex, v);
  detail::SimplexIndex index(static_cast<std::size_t>(max_vertex) + 1,
                             static_cast<std::size_t>(max_dim()));
  std::vector<Vertex> face;
  for (std::size_t i = 0; i < size(); ++i) {
    const auto s = simplex(i);
    if (!std::is_sorted(s.begin(), s.end()) ||
        std::adjacent_find(s.begin(), s.end()) != s.end()) {
      throw InconsistentFiltrationError("simplex " + std::to_string(i) +
                                        " has unsorted or repeated vertices");
    }
    if (std::isnan(values_[i]) || values_[i] < 0.0) {
      throw InconsistentFiltrationError("filtration values must be >= 0");
    }
    if (i > 0 && values_[i] < values_[i - 1]) {
      throw InconsistentFiltrationError("filtration values decrease at " +
                                        std::to_string(i));
    }
    if (s.size() > 1) {
      for (std::size_t drop = 0; drop < s.size(); ++drop) {
        face.clear();
        for (std::size_t k = 0; k < s.size(); ++k) {
          if (k != drop) face.push_back(s[k]);
        }
        if (index.find(face) == detail::SimplexIndex::npos) {
          throw InconsistentFiltrationError("simplex " + std::to_string(i) +
                                            " appears before one of its faces");
        }
      }
    }
    if (!index.insert(s, i)) {
      throw InconsistentFiltrationError("simplex " + std::to_string(i) +
                                        " appears twice");
    }
  }
}

namespace {

struct RipsBuilder {
  const DistanceMatrix& dm;
  double max_value;
  std::size_t max_size;  // max_dim + 1 vertices
  std::vector<std::vector<Vertex>> neighbors;  // higher-indexed, within threshold

  std::vector<Vertex> packed;       // vertex lists of simplices of dim >= 1
  std::vector<double> values;
  std::vector<std::uint8_t> sizes;

  void extend(std::vector<Vertex>& current, double diameter,
              const std::vector<Vertex>& candidates) {
    std::vector<Vertex> next;
    for (Vertex v : candidates) {
      double d = diameter;
      for (Vertex u : current) d = std::max(d, dm(u, v));
      current.push_back(v);
      packed.insert(packed.end(), current.begin(), current.end());
      values.push_back(d);
      sizes.push_back(static_cast<std::uint8_t>(current.size()));
      if (current.size() < max_size) {
        next.clear();
        const auto& nv = neighbors[v];
        std::set_intersection(candidates.begin(), candidates.end(), nv.begin(),
                              nv.end(), std::back_inserter(next));
        if (!next.empty()) extend(current, d, next);
      }
      current.pop_back();
    }
  }
};

}  // namespace

Filtration vietoris_rips(const DistanceMatrix& dm, int max_dim, double max_value) {
  if (max_dim < 0) throw ArgumentError("vietoris_rips: max_dim must be >= 0");
  if (std::isnan(max_value) || max_value < 0.0) {
    throw ArgumentError("vietoris_rips: max_value must be >= 0");
  }
  if (max_dim > 250) throw ArgumentError("vietoris_rips: max_dim too large");
  const std::size_t n = dm.size();
  Filtration f;
  for (std::size_t i = 0; i < n; ++i) {
    const Vertex v = static_cast<Vertex>(i);
    f.push_back(std::span<const Vertex>(&v, 1), 0.0);
  }
  if (max_dim == 0 || n < 2) return f;

  RipsBuilder b{dm, max_value, static_cast<std::size_t>(max_dim) + 1, {}, {}, {}, {}};
  b.neighbors.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (dm(i, j) <= max_value) b.neighbors[i].push_back(static_cast<Vertex>(j));
    }
  }
  std::vector<Vertex> current;
  for (std::size_t i = 0; i < n; ++i) {
    if (b.neighbors[i].empty()) continue;
    current.assign(1, static_cast<Vertex>(i));
    b.extend(current, 0.0, b.neighbors[i]);
  }

  // The depth-first walk emits each dimension in lexicographic order, so a
  // stable sort on (value, dimension) yields the full (value, dim, lex) order.
  const std::size_t count = b.values.size();
  std::vector<std::size_t> offsets(count + 1, 0);
  for (std::size_t i = 0; i < count; ++i) offsets[i + 1] = offsets[i] + b.sizes[i];
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    if (b.values[x] != b.values[y]) return b.values[x] < b.values[y];
    if (b.sizes[x] != b.sizes[y]) return b.sizes[x] < b.sizes[y];
    const auto* px = b.packed.data() + offsets[x];
    const auto* py = b.packed.data() + offsets[y];
    return std::lexicographical_compare(px, px + b.sizes[x], py, py + b.sizes[y]);
  });
  for (std::size_t i : order) {
    f.push_back(std::span<const Vertex>(b.packed.data() + offsets[i], b.sizes[i]),
                b.values[i]);
  }
  return f;
}

double enclosing_radius(const DistanceMatrix& dm) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < dm.size(); ++i) {
    const auto r = dm.row(i);
    best = std::min(best, *std::max_element(r.begin(), r.end()));
  }
  return dm.size() ? best : 0.0;
}

std::string filtration_csv(const Filtration& f) {
  std::string out;
  for (std::size_t i = 0; i < f.size(); ++i) {
    out += text::format_double(f.value(i));
    out += ',';
    out += std::to_string(f.dim(i));
    out += ',';
    const auto s = f.simplex(i);
    for (std::size_t k = 0; k < s.size(); ++k) {
      if (k) out += ' ';
      out += std::to_string(s[k]);
    }
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Smallest enclosing ball

namespace {

using Point = std::vector<double>;

constexpr double kContainSlack = 1e-12;

bool contains(const Ball& ball, const Point& p) {
  if (ball.radius < 0.0) return false;
  double s = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double d = p[k] - ball.center[k];
    s += d * d;
  }
  return std::sqrt(s) <= ball.radius + kContainSlack * (1.0 + ball.radius);
}

// Ball with every support point on its boundary, centred in their affine
// hull. Returns radius < 0 if the support is affinely dependent.
Ball circumball(const std::vector<const Point*>& support) {
  const std::size_t dim = support.front()->size();
  const Point& p0 = *support.front();
  const std::size_t r = support.size() - 1;
  if (r == 0) return Ball{p0, 0.0};

  std::vector<Point> a(r, Point(dim));
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t k = 0; k < dim; ++k) a[i][k] = (*support[i + 1])[k] - p0[k];
  }
  // (A^T A) lambda = |a_i|^2 / 2, solved by elimination with partial pivoting.
  std::vector<std::vector<double>> m(r, std::vector<double>(r + 1, 0.0));
  double scale = 0.0;
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < r; ++j) {
      double dot = 0.0;
      for (std::size_t k = 0; k < dim; ++k) dot += a[i][k] * a[j][k];
      m[i][j] = dot;
    }
    m[i][r] = 0.5 * m[i][i];
    scale = std::max(scale, m[i][i]);
  }
  for (std::size_t col = 0; col < r; ++col) {
    std::size_t piv = col;
    for (std::size_t i = col + 1; i < r; ++i) {
      if (std::abs(m[i][col]) > std::abs(m[piv][col])) piv = i;
    }
    if (std::abs(m[piv][col]) <= 1e-12 * scale) return Ball{{}, -1.0};
    std::swap(m[piv], m[col]);
    for (std::size_t i = 0; i < r; ++i) {
      if (i == col) continue;
      const double factor = m[i][col] / m[col][col];
      for (std::size_t j = col; j <= r; ++j) m[i][j] -= factor * m[col][j];
    }
  }
  Ball ball{p0, 0.0};
  for (std::size_t i = 0; i < r; ++i) {
    const double lambda = m[i][r] / m[i][i];
    for (std::size_t k = 0; k < dim; ++k) ball.center[k] += lambda * a[i][k];
  }
  double s = 0.0;
  for (std::size_t k = 0; k < dim; ++k) {
    const double d = ball.center[k] - p0[k];
    s += d * d;
  }
  ball.radius = std::sqrt(s);
  return ball;
}

// Degenerate supports only arise from duplicated or exactly co-spherical
// points; fall back to the best ball spanned by a subset of the support.
Ball ball_from_support(const std::vector<const Point*>& support) {
  if (support.empty()) return Ball{{}, -1.0};
  Ball b = circumball(support);
  if (b.radius >= 0.0) return b;
  Ball best{{}, -1.0};
  const std::size_t r = support.size();
  for (std::uint32_t mask = 1; mask + 1 < (1u << r); ++mask) {
    std::vector<const Point*> sub;
    for (std::size_t i = 0; i < r; ++i) {
      if (mask & (1u << i)) sub.push_back(support[i]);
    }
    Ball c = circumball(sub);
    if (c.radius < 0.0) continue;
    if (best.radius >= 0.0 && c.radius >= best.radius) continue;
    bool all = true;
    for (const Point* p : support) all = all && contains(c, *p);
    if (all) best = std::move(c);
  }
  return best;
}

Ball welzl(const std::vector<Point>& pts, std::size_t count,
           std::vector<const Point*>& support, std::size_t dim) {
  if (count == 0 || support.size() == dim + 1) return ball_from_support(support);
  const Point& p = pts[count - 1];
  Ball ball = welzl(pts, count - 1, support, dim);
  if (contains(ball, p)) return ball;
  support.push_back(&p);
  ball = welzl(pts, count - 1, support, dim);
  support.pop_back();
  return ball;
}

void check_oracle_dim(const PointCloud& cloud) {
  if (cloud.dim() > 3) {
    throw UnsupportedDimensionError("Cech oracle supports dimension <= 3, got " +
                                    std::to_string(cloud.dim()));
  }
}

}  // namespace

Ball smallest_enclosing_ball(const PointCloud& cloud,
                             std::span<const Vertex> vertices) {
  check_oracle_dim(cloud);
  if (vertices.empty()) throw ArgumentError("enclosing ball of nothing");
  std::vector<Point> pts;
  pts.reserve(vertices.size());
  for (Vertex v : vertices) {
    if (v >= cloud.size()) throw ArgumentError("vertex index out of range");
    const auto p = cloud.point(v);
    pts.emplace_back(p.begin(), p.end());
  }
  std::vector<const Point*> support;
  return welzl(pts, pts.size(), support, cloud.dim());
}

bool cech_membership(const PointCloud& cloud, const Simplex& simplex, double eps) {
  if (!(eps >= 0.0)) throw ArgumentError("cech_membership: eps must be >= 0");
  const Ball b = smallest_enclosing_ball(cloud, simplex.vertices());
  return b.radius <= eps * (1.0 + 1e-9);
}

std::vector<Simplex> cech_complex(const PointCloud& cloud, double eps,
                                  int max_dim) {
  check_oracle_dim(cloud);
  if (cloud.size() > 32) {
    throw ScopeError("Cech oracle is limited to 32 points, got " +
                     std::to_string(cloud.size()));
  }
  if (max_dim < 0) throw ArgumentError("cech_complex: max_dim must be >= 0");
  std::vector<Simplex> out;
  std::vector<Vertex> current;
  const auto n = static_cast<Vertex>(cloud.size());
  // Membership is monotone under taking faces, so failing sets are pruned.
  auto grow = [&](auto&& self, Vertex from) -> void {
    if (current.size() == static_cast<std::size_t>(max_dim) + 1) return;
    for (Vertex v = from; v < n; ++v) {
      current.push_back(v);
      Simplex s(current);
      if (cech_membership(cloud, s, eps)) {
        out.push_back(std::move(s));
        self(self, v + 1);
      }
      current.pop_back();
    }
  };
  grow(grow, 0);
  std::sort(out.begin(), out.end(), [](const Simplex& x, const Simplex& y) {
    if (x.dim() != y.dim()) return x.dim() < y.dim();
    return x < y;
  });
  return out;
}

}  // namespace tda
