#include "tda/persistence.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <string>

#include "simplex_index.hpp"
#include "tda/error.hpp"
#include "tda/text.hpp"

namespace tda {

BoundaryMatrix boundary_matrix(const Filtration& filtration) {
  BoundaryMatrix m;
  const std::size_t n = filtration.size();
  m.columns.resize(n);
  m.dims.resize(n);
  if (n == 0) return m;
  if (n > std::numeric_limits<std::uint32_t>::max()) {
    throw ScopeError("filtration too large for 32-bit column indices");
  }

  Vertex max_vertex = 0;
  int top = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto s = filtration.simplex(i);
    max_vertex = std::max(max_vertex, s.back());
    top = std::max(top, static_cast<int>(s.size()) - 1);
  }
  // Only simplices below the top dimension can be faces.
  const std::size_t face_dims = top > 0 ? static_cast<std::size_t>(top - 1) : 0;
  detail::SimplexIndex index(static_cast<std::size_t>(max_vertex) + 1, face_dims);

  std::vector<Vertex> face;
  for (std::size_t j = 0; j < n; ++j) {
    const auto s = filtration.simplex(j);
    m.dims[j] = static_cast<std::uint32_t>(s.size() - 1);
    if (s.size() > 1) {
      auto& col = m.columns[j];
      col.reserve(s.size());
      for (std::size_t drop = 0; drop < s.size(); ++drop) {
        face.clear();
        for (std::size_t k = 0; k < s.size(); ++k) {
          if (k != drop) face.push_back(s[k]);
        }
        const std::size_t pos = index.find(face);
        if (pos == detail::SimplexIndex::npos) {
          throw InconsistentFiltrationError(
              "face of simplex " + std::to_string(j) +
              " is missing or does not precede it");
        }
        col.push_back(static_cast<std::uint32_t>(pos));
      }
      std::sort(col.begin(), col.end());
    }
    if (s.size() - 1 <= face_dims && !index.insert(s, j)) {
      throw InconsistentFiltrationError("simplex " + std::to_string(j) +
                                        " appears twice");
    }
  }
  return m;
}

Reduction reduce(BoundaryMatrix matrix, ReduceOptions options) {
  const std::size_t n = matrix.size();
  constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> pivot_owner(n, kNone);  // row -> column with that low
  std::vector<bool> cleared(n, false);

  std::uint32_t top = 0;
  for (auto d : matrix.dims) top = std::max(top, d);
  std::vector<std::vector<std::uint32_t>> by_dim(top + 1);
  for (std::size_t j = 0; j < n; ++j) {
    by_dim[matrix.dims[j]].push_back(static_cast<std::uint32_t>(j));
  }

  std::vector<std::uint32_t> scratch;
  auto reduce_column = [&](std::uint32_t j) {
    auto& col = matrix.columns[j];
    if (cleared[j]) {
      col.clear();
      return;
    }
    while (!col.empty()) {
      const std::uint32_t owner = pivot_owner[col.back()];
      if (owner == kNone) break;
      const auto& other = matrix.columns[owner];
      scratch.clear();
      std::set_symmetric_difference(col.begin(), col.end(), other.begin(),
                                    other.end(), std::back_inserter(scratch));
      col.swap(scratch);
    }
    if (!col.empty()) {
      pivot_owner[col.back()] = j;
      if (options.clearing) cleared[col.back()] = true;
    }
  };

  // Columns only ever absorb columns of their own dimension, so processing
  // dimensions in either order reproduces the left-to-right result; top-down
  // is what makes clearing possible.
  for (std::uint32_t step = 0; step <= top; ++step) {
    const std::uint32_t d = options.clearing ? top - step : step;
    for (std::uint32_t j : by_dim[d]) reduce_column(j);
  }

  Reduction out;
  for (std::size_t row = 0; row < n; ++row) {
    if (pivot_owner[row] != kNone) out.pairs.emplace_back(row, pivot_owner[row]);
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (matrix.columns[j].empty() && pivot_owner[j] == kNone) {
      out.essentials.push_back(j);
    }
  }
  out.reduced = std::move(matrix);
  return out;
}

Reduction reduce_dual(const BoundaryMatrix& matrix, ReduceOptions options) {
  const std::size_t n = matrix.size();
  constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
  const auto flip = [n](std::size_t i) { return static_cast<std::uint32_t>(n - 1 - i); };

  BoundaryMatrix co;
  co.columns.resize(n);
  co.dims.resize(n);
  std::uint32_t top = 0;
  for (std::size_t j = 0; j < n; ++j) {
    co.dims[flip(j)] = matrix.dims[j];
    top = std::max(top, matrix.dims[j]);
  }
  // Visiting j downwards appends flip(j) in ascending order.
  for (std::size_t j = n; j-- > 0;) {
    for (std::uint32_t i : matrix.columns[j]) co.columns[flip(i)].push_back(flip(j));
  }
  std::vector<std::vector<std::uint32_t>> by_dim(top + 1);
  for (std::size_t c = 0; c < n; ++c) by_dim[co.dims[c]].push_back(static_cast<std::uint32_t>(c));

  std::vector<std::uint32_t> pivot_owner(n, kNone);
  std::vector<bool> cleared(n, false);
  std::vector<std::uint32_t> scratch;
  for (std::uint32_t d = 0; d <= top; ++d) {
    for (std::uint32_t c : by_dim[d]) {
      auto& col = co.columns[c];
      if (cleared[c]) {
        col.clear();
        continue;
      }
      while (!col.empty()) {
        const std::uint32_t owner = pivot_owner[col.back()];
        if (owner == kNone) break;
        const auto& other = co.columns[owner];
        scratch.clear();
        std::set_symmetric_difference(col.begin(), col.end(), other.begin(), other.end(),
                                      std::back_inserter(scratch));
        col.swap(scratch);
      }
      if (!col.empty()) {
        pivot_owner[col.back()] = c;
        if (options.clearing) cleared[col.back()] = true;
      }
    }
  }

  Reduction out;
  for (std::size_t row = 0; row < n; ++row) {
    // Row flip(j) owned by column flip(i): simplex i is killed by simplex j.
    if (pivot_owner[row] != kNone) out.pairs.emplace_back(flip(pivot_owner[row]), flip(row));
  }
  std::sort(out.pairs.begin(), out.pairs.end());
  for (std::size_t j = 0; j < n; ++j) {
    if (co.columns[flip(j)].empty() && pivot_owner[flip(j)] == kNone) {
      out.essentials.push_back(j);
    }
  }
  out.reduced = std::move(co);
  return out;
}

PersistenceDiagram::PersistenceDiagram(int degree,
                                       std::vector<PersistencePair> points,
                                       std::vector<double> essentials)
    : degree_(degree), points_(std::move(points)), essentials_(std::move(essentials)) {
  if (degree_ < 0) throw ArgumentError("diagram degree must be >= 0");
  for (const auto& p : points_) {
    if (!std::isfinite(p.birth) || !(p.death > p.birth)) {
      throw ArgumentError("diagram point needs finite birth < death");
    }
  }
  for (double b : essentials_) {
    if (!std::isfinite(b)) throw ArgumentError("essential birth must be finite");
  }
  std::sort(points_.begin(), points_.end());
  std::sort(essentials_.begin(), essentials_.end());
}

std::vector<PersistenceDiagram> diagrams(const Filtration& filtration,
                                         int max_degree, ReduceOptions options) {
  if (max_degree < 0) throw ArgumentError("diagrams: max_degree must be >= 0");
  const auto top = static_cast<std::size_t>(max_degree) + 1;

  const Filtration* source = &filtration;
  Filtration trimmed;
  if (filtration.max_dim() > static_cast<int>(top)) {
    for (std::size_t i = 0; i < filtration.size(); ++i) {
      if (filtration.dim(i) <= top) {
        trimmed.push_back(filtration.simplex(i), filtration.value(i));
      }
    }
    source = &trimmed;
  }

  const Reduction r = options.dual ? reduce_dual(boundary_matrix(*source), options)
                                   : reduce(boundary_matrix(*source), options);
  std::vector<std::vector<PersistencePair>> points(top);
  std::vector<std::vector<double>> essentials(top);
  for (const auto& [b, d] : r.pairs) {
    const std::size_t deg = source->dim(b);
    if (deg >= top) continue;
    const double vb = source->value(b);
    const double vd = source->value(d);
    if (vd > vb) points[deg].push_back({vb, vd});
  }
  for (std::size_t j : r.essentials) {
    const std::size_t deg = source->dim(j);
    if (deg < top) essentials[deg].push_back(source->value(j));
  }
  std::vector<PersistenceDiagram> out;
  out.reserve(top);
  for (std::size_t deg = 0; deg < top; ++deg) {
    out.emplace_back(static_cast<int>(deg), std::move(points[deg]),
                     std::move(essentials[deg]));
  }
  return out;
}

int betti_number(const PersistenceDiagram& diagram, double eps) {
  if (!(eps >= 0.0)) throw ArgumentError("betti_number: eps must be >= 0");
  int count = 0;
  for (const auto& p : diagram.points()) count += (p.birth <= eps && eps < p.death);
  for (double b : diagram.essentials()) count += (b <= eps);
  return count;
}

int persistent_betti(const PersistenceDiagram& diagram, double s, double t) {
  if (s > t) throw ArgumentError("persistent_betti: need s <= t");
  int count = 0;
  for (const auto& p : diagram.points()) count += (p.birth <= s && p.death > t);
  for (double b : diagram.essentials()) count += (b <= s);
  return count;
}

int multiplicity(const BettiTable& beta, std::size_t i, std::size_t j,
                 std::size_t m) {
  if (!(0 < i && i < j && j <= m)) {
    throw ArgumentError("multiplicity: need 0 < i < j <= m");
  }
  return beta(i - 1, j) - beta(i, j) + beta(i, j - 1) - beta(i - 1, j - 1);
}

int multiplicity(const PersistenceDiagram& diagram, std::size_t i, std::size_t j,
                 std::span<const double> grid) {
  if (grid.empty()) throw ArgumentError("multiplicity: empty grid");
  for (std::size_t k = 1; k < grid.size(); ++k) {
    if (!(grid[k - 1] < grid[k])) {
      throw ArgumentError("multiplicity: grid must be strictly increasing");
    }
  }
  return multiplicity(
      [&](std::size_t a, std::size_t b) {
        return persistent_betti(diagram, grid[a], grid[b]);
      },
      i, j, grid.size() - 1);
}

PersistenceDiagram rescale(const PersistenceDiagram& diagram, double factor) {
  if (!(factor > 0.0)) throw ArgumentError("rescale: factor must be positive");
  std::vector<PersistencePair> pts;
  for (const auto& p : diagram.points()) pts.push_back({p.birth * factor, p.death * factor});
  std::vector<double> ess;
  for (double b : diagram.essentials()) ess.push_back(b * factor);
  return PersistenceDiagram(diagram.degree(), std::move(pts), std::move(ess));
}

std::string diagrams_csv(std::span<const PersistenceDiagram> diagrams) {
  std::vector<const PersistenceDiagram*> sorted;
  for (const auto& d : diagrams) sorted.push_back(&d);
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](auto* a, auto* b) { return a->degree() < b->degree(); });
  std::string out;
  for (const auto* d : sorted) {
    // Points and essentials are sorted; essentials sort after every finite
    // point with the same birth because their death is +inf.
    std::vector<PersistencePair> rows(d->points().begin(), d->points().end());
    for (double b : d->essentials()) rows.push_back({b, kInfinity});
    std::sort(rows.begin(), rows.end());
    const std::string deg = std::to_string(d->degree());
    for (const auto& p : rows) {
      out += deg;
      out += ',';
      out += text::format_double(p.birth);
      out += ',';
      out += text::format_double(p.death);
      out += '\n';
    }
  }
  return out;
}

std::vector<PersistenceDiagram> parse_diagrams_csv(std::istream& in,
                                                   std::size_t min_degrees) {
  std::vector<std::vector<PersistencePair>> points(min_degrees);
  std::vector<std::vector<double>> essentials(min_degrees);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = text::trim(line);
    if (body.empty()) continue;
    const auto fields = text::split(body, ',');
    if (fields.size() != 3) throw ParseError("expected degree,birth,death", line_no);
    const auto deg = text::parse_double(fields[0]);
    const auto birth = text::parse_double(fields[1]);
    const auto death = text::parse_double(fields[2]);
    if (!deg || *deg < 0 || *deg != std::floor(*deg) || *deg > 1e6) {
      throw ParseError("bad degree", line_no);
    }
    if (!birth || !std::isfinite(*birth)) throw ParseError("bad birth", line_no);
    if (!death || std::isnan(*death) || !(*death > *birth)) {
      throw ParseError("death must exceed birth", line_no);
    }
    const auto d = static_cast<std::size_t>(*deg);
    if (d >= points.size()) {
      points.resize(d + 1);
      essentials.resize(d + 1);
    }
    if (std::isinf(*death)) {
      essentials[d].push_back(*birth);
    } else {
      points[d].push_back({*birth, *death});
    }
  }
  std::vector<PersistenceDiagram> out;
  for (std::size_t d = 0; d < points.size(); ++d) {
    out.emplace_back(static_cast<int>(d), std::move(points[d]),
                     std::move(essentials[d]));
  }
  return out;
}

std::string diagram_scatter_csv(const PersistenceDiagram& diagram) {
  std::string out = "birth,death\n";
  for (const auto& p : diagram.points()) {
    out += text::format_double(p.birth);
    out += ',';
    out += text::format_double(p.death);
    out += '\n';
  }
  return out;
}

}  // namespace tda
