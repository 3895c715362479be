#include "tda/summaries.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <list>
#include <nlohmann/json.hpp>

#include "tda/error.hpp"
#include "tda/text.hpp"

namespace tda {

DeathVector death_vector(const PersistenceDiagram& diagram) {
  if (diagram.degree() != 0) {
    throw InvalidInputError("death vector needs a degree-0 diagram");
  }
  DeathVector dv;
  dv.deaths.reserve(diagram.points().size());
  for (const auto& p : diagram.points()) {
    if (p.birth != 0.0) {
      throw InvalidInputError("degree-0 point with nonzero birth; not a Rips diagram");
    }
    dv.deaths.push_back(p.death);
  }
  std::sort(dv.deaths.begin(), dv.deaths.end(), std::greater<>());
  return dv;
}

DeathVector truncate_death_vector(const DeathVector& dv, std::size_t drop_first,
                                  std::size_t keep) {
  DeathVector out;
  out.deaths.assign(keep, 0.0);
  for (std::size_t i = 0; i < keep && drop_first + i < dv.deaths.size(); ++i) {
    out.deaths[i] = dv.deaths[drop_first + i];
  }
  return out;
}

double triangle_function(double b, double d, double t) {
  if (!(b < d)) throw ArgumentError("triangle_function: need b < d");
  const double mid = 0.5 * (b + d);
  if (t >= b && t < mid) return t - b;
  if (t >= mid && t < d) return d - t;
  return 0.0;
}

PersistenceLandscape::PersistenceLandscape(std::vector<std::vector<CriticalPoint>> functions)
    : functions_(std::move(functions)) {
  for (const auto& f : functions_) {
    segments_.emplace_back(f.empty() ? 0 : f.size() - 1, Segment{});
  }
}

PersistenceLandscape::PersistenceLandscape(std::vector<std::vector<CriticalPoint>> functions,
                                           std::vector<std::vector<Segment>> segments)
    : functions_(std::move(functions)), segments_(std::move(segments)) {
  if (segments_.size() != functions_.size()) {
    throw ArgumentError("landscape: one segment list per function");
  }
  for (std::size_t k = 0; k < functions_.size(); ++k) {
    if (segments_[k].size() + 1 != std::max<std::size_t>(functions_[k].size(), 1)) {
      throw ArgumentError("landscape: segment count must be one less than point count");
    }
  }
}

PersistenceLandscape PersistenceLandscape::without_first(std::size_t drop_first) const {
  const std::size_t from = std::min(drop_first, functions_.size());
  return PersistenceLandscape({functions_.begin() + static_cast<std::ptrdiff_t>(from), functions_.end()},
                              {segments_.begin() + static_cast<std::ptrdiff_t>(from), segments_.end()});
}

namespace {

using Segment = PersistenceLandscape::Segment;

double line_value(const Segment& s, double t) {
  switch (s.kind) {
    case Segment::Kind::rising: return t - s.c;
    case Segment::Kind::falling: return s.c - t;
    default: return 0.0;
  }
}

bool goes_up(const Segment& s) { return s.kind == Segment::Kind::rising; }
bool goes_down(const Segment& s) {
  return s.kind == Segment::Kind::falling || s.kind == Segment::Kind::zero;
}

// Near a break between segments a and b the function is max(a, b) at a
// valley and min(a, b) at a peak. Stored break points are rounded, so t may
// sit on the wrong side of the true crossing; combining both lines gives the
// correctly rounded value either way.
double across_break(const Segment& a, const Segment& b, double v, double t) {
  if (goes_down(a) && goes_up(b)) return std::max(v, std::max(line_value(a, t), line_value(b, t)));
  if (goes_up(a) && goes_down(b)) return std::min(v, std::min(line_value(a, t), line_value(b, t)));
  return v;
}

}  // namespace

double PersistenceLandscape::evaluate(std::size_t k, double t) const {
  if (k >= functions_.size()) return 0.0;
  // Each piece is within rounding of the true value; the running minimum
  // keeps lambda_k <= lambda_{k-1} exact where several tents nearly meet.
  double v = piece_value(0, t);
  for (std::size_t j = 1; j <= k; ++j) v = std::min(v, piece_value(j, t));
  return v;
}

double PersistenceLandscape::piece_value(std::size_t k, double t) const {
  const auto& f = functions_[k];
  if (f.empty() || t <= f.front().t || t >= f.back().t) return 0.0;
  const auto it = std::upper_bound(f.begin(), f.end(), t,
                                   [](double x, const CriticalPoint& c) { return x < c.t; });
  const auto& right = *it;
  const auto& left = *std::prev(it);
  const auto& segs = segments_[k];
  const std::size_t i = static_cast<std::size_t>(std::prev(it) - f.begin());
  if (segs[i].kind == Segment::Kind::interpolate) {
    if (right.t == left.t) return std::max(left.value, right.value);
    return left.value + (right.value - left.value) * (t - left.t) / (right.t - left.t);
  }
  double v = line_value(segs[i], t);
  if (i > 0) v = across_break(segs[i - 1], segs[i], v, t);
  if (i + 1 < segs.size()) v = across_break(segs[i], segs[i + 1], v, t);
  return std::max(0.0, v);
}

PersistenceLandscape landscape(const PersistenceDiagram& diagram) {
  return landscape(diagram.points());
}

// Sweep construction: each pass peels off the upper envelope of the tents
// still in the list, and the parts of tents hidden under it are pushed back
// for the following passes.
PersistenceLandscape landscape(std::span<const PersistencePair> points) {
  using Pair = std::pair<double, double>;
  const auto before = [](const Pair& x, const Pair& y) {
    return x.first != y.first ? x.first < y.first : x.second > y.second;
  };
  std::vector<Pair> sorted;
  sorted.reserve(points.size());
  for (const auto& p : points) {
    if (!(p.birth < p.death)) throw ArgumentError("landscape: need birth < death");
    sorted.emplace_back(p.birth, p.death);
  }
  std::sort(sorted.begin(), sorted.end(), before);
  std::list<Pair> pending(sorted.begin(), sorted.end());

  using Seg = PersistenceLandscape::Segment;
  std::vector<std::vector<CriticalPoint>> functions;
  std::vector<std::vector<Seg>> segments;
  while (!pending.empty()) {
    std::vector<CriticalPoint> f;
    std::vector<Seg> segs;
    // Appends a critical point reached along `line`.
    const auto reach = [&](CriticalPoint p, Seg line) {
      f.push_back(p);
      segs.push_back(line);
    };
    auto [b, d] = pending.front();
    auto cursor = pending.erase(pending.begin());
    f.push_back({b, 0.0});
    reach({0.5 * (b + d), 0.5 * (d - b)}, {Seg::Kind::rising, b});
    while (true) {
      const auto next = std::find_if(cursor, pending.end(),
                                     [&](const Pair& p) { return p.second > d; });
      if (next == pending.end()) {
        reach({d, 0.0}, {Seg::Kind::falling, d});
        break;
      }
      const auto [nb, nd] = *next;
      cursor = pending.erase(next);
      if (nb > d) {
        reach({d, 0.0}, {Seg::Kind::falling, d});
        reach({nb, 0.0}, {Seg::Kind::zero, 0.0});
      } else if (nb == d) {
        reach({nb, 0.0}, {Seg::Kind::falling, d});
      } else {
        // The tents cross at ((nb + d)/2, (d - nb)/2); the piece of the new
        // tent below the crossing behaves like the point (nb, d).
        reach({0.5 * (nb + d), 0.5 * (d - nb)}, {Seg::Kind::falling, d});
        const Pair hidden{nb, d};
        auto at = cursor;
        while (at != pending.end() && before(*at, hidden)) ++at;
        pending.insert(at, hidden);
      }
      reach({0.5 * (nb + nd), 0.5 * (nd - nb)}, {Seg::Kind::rising, nb});
      b = nb;
      d = nd;
    }
    functions.push_back(std::move(f));
    segments.push_back(std::move(segs));
  }
  return PersistenceLandscape(std::move(functions), std::move(segments));
}

PersistenceLandscape drop_landscape_functions(const PersistenceLandscape& ls,
                                              std::size_t drop_first) {
  return ls.without_first(drop_first);
}

std::string to_string(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::death: return "death";
    case FeatureKind::landscape: return "landscape";
    case FeatureKind::concatenated: return "concatenated";
  }
  return "unknown";
}

FeatureVector to_feature_vector(const DeathVector& dv) {
  return FeatureVector{dv.deaths, FeatureKind::death, std::nullopt};
}

FeatureVector vectorize_landscape(const PersistenceLandscape& ls,
                                  const LandscapeGrid& grid) {
  if (grid.functions == 0) throw ArgumentError("grid needs K >= 1");
  if (!(grid.step > 0.0) || !std::isfinite(grid.start)) {
    throw ArgumentError("grid needs a finite start and a positive step");
  }
  FeatureVector v{std::vector<double>(grid.length(), 0.0), FeatureKind::landscape,
                  grid};
  const std::size_t live = std::min(grid.functions, ls.size());
  for (std::size_t i = 0; i < grid.points(); ++i) {
    double running = 0.0;
    for (std::size_t k = 0; k < live; ++k) {
      const double x = ls.piece_value(k, grid.at(i));
      running = k == 0 ? x : std::min(running, x);
      v.values[k * grid.points() + i] = running;
    }
  }
  return v;
}

FeatureVector mean_vectors(std::span<const FeatureVector> group) {
  if (group.empty()) throw ArgumentError("mean_vectors: empty group");
  FeatureVector out = group.front();
  for (std::size_t g = 1; g < group.size(); ++g) {
    if (group[g].size() != out.size()) {
      throw ArgumentError("mean_vectors: length mismatch");
    }
    for (std::size_t i = 0; i < out.size(); ++i) out.values[i] += group[g].values[i];
  }
  const double n = static_cast<double>(group.size());
  for (double& x : out.values) x /= n;
  return out;
}

FeatureVector diff_vectors(const FeatureVector& a, const FeatureVector& b) {
  if (a.size() != b.size()) throw ArgumentError("diff_vectors: length mismatch");
  FeatureVector out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out.values[i] -= b.values[i];
  return out;
}

std::vector<FeatureVector> pad_to_common_length(std::vector<FeatureVector> vectors) {
  std::size_t len = 0;
  for (const auto& v : vectors) len = std::max(len, v.size());
  for (auto& v : vectors) v.values.resize(len, 0.0);
  return vectors;
}

std::string landscape_json(const PersistenceLandscape& ls) {
  nlohmann::json j = nlohmann::json::array();
  for (std::size_t k = 0; k < ls.size(); ++k) {
    nlohmann::json f = nlohmann::json::array();
    for (const auto& c : ls.function(k)) f.push_back({c.t, c.value});
    j.push_back(std::move(f));
  }
  return j.dump() + "\n";
}

PersistenceLandscape parse_landscape_json(std::string_view json) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("landscape JSON: ") + e.what(), 0);
  }
  if (!j.is_array()) throw ParseError("landscape JSON must be an array", 0);
  std::vector<std::vector<CriticalPoint>> functions;
  for (const auto& f : j) {
    if (!f.is_array()) throw ParseError("landscape function must be an array", 0);
    std::vector<CriticalPoint> pts;
    for (const auto& c : f) {
      if (!c.is_array() || c.size() != 2 || !c[0].is_number() || !c[1].is_number()) {
        throw ParseError("critical point must be [t, value]", 0);
      }
      pts.push_back({c[0].get<double>(), c[1].get<double>()});
    }
    functions.push_back(std::move(pts));
  }
  return PersistenceLandscape(std::move(functions));
}

std::string landscape_grid_csv(const FeatureVector& v) {
  if (!v.grid) throw ArgumentError("landscape_grid_csv: vector has no grid");
  const auto& g = *v.grid;
  if (v.size() != g.length()) throw ArgumentError("landscape_grid_csv: bad length");
  std::string out;
  for (std::size_t k = 0; k < g.functions; ++k) {
    const std::string kk = std::to_string(k + 1);
    for (std::size_t i = 0; i < g.points(); ++i) {
      out += kk;
      out += ',';
      out += text::format_double(g.at(i));
      out += ',';
      out += text::format_double(v.values[k * g.points() + i]);
      out += '\n';
    }
  }
  return out;
}

FeatureVector parse_landscape_grid_csv(std::string_view csv) {
  std::vector<std::size_t> ks;
  std::vector<double> ts, values;
  std::size_t line_no = 0;
  for (auto line : text::split(csv, '\n')) {
    ++line_no;
    line = text::trim(line);
    if (line.empty()) continue;
    const auto fields = text::split(line, ',');
    if (fields.size() != 3) throw ParseError("expected k,t,value", line_no);
    const auto k = text::parse_double(fields[0]);
    const auto t = text::parse_double(fields[1]);
    const auto val = text::parse_double(fields[2]);
    if (!k || *k < 1 || *k != std::floor(*k)) throw ParseError("bad k", line_no);
    if (!t || !std::isfinite(*t)) throw ParseError("bad t", line_no);
    if (!val || !std::isfinite(*val)) throw ParseError("bad value", line_no);
    ks.push_back(static_cast<std::size_t>(*k));
    ts.push_back(*t);
    values.push_back(*val);
  }
  if (values.empty()) throw EmptyInputError("landscape grid file has no rows");
  const std::size_t functions = ks.back();
  if (values.size() % functions != 0) {
    throw ParseError("rows are not a whole number of landscape functions", 0);
  }
  const std::size_t points = values.size() / functions;
  for (std::size_t r = 0; r < values.size(); ++r) {
    if (ks[r] != r / points + 1 || ts[r] != ts[r % points]) {
      throw ParseError("grid rows are not k-major on a common grid", r + 1);
    }
  }
  LandscapeGrid g;
  g.functions = functions;
  g.steps = points - 1;
  g.start = ts.front();
  g.step = g.steps ? (ts[points - 1] - ts.front()) / static_cast<double>(g.steps) : 1.0;
  return FeatureVector{std::move(values), FeatureKind::landscape, g};
}

std::string death_vector_csv(const FeatureVector& v) {
  std::string out;
  for (double x : v.values) {
    out += text::format_double(x);
    out += '\n';
  }
  return out;
}

FeatureVector parse_death_vector_csv(std::string_view csv) {
  FeatureVector v{{}, FeatureKind::death, std::nullopt};
  std::size_t line_no = 0;
  for (auto line : text::split(csv, '\n')) {
    ++line_no;
    line = text::trim(line);
    if (line.empty()) continue;
    const auto x = text::parse_double(line);
    if (!x || !std::isfinite(*x)) throw ParseError("bad death value", line_no);
    v.values.push_back(*x);
  }
  return v;
}

std::string landscape_polyline_csv(const PersistenceLandscape& ls) {
  std::string out = "k,t,value\n";
  for (std::size_t k = 0; k < ls.size(); ++k) {
    const std::string kk = std::to_string(k + 1);
    for (const auto& c : ls.function(k)) {
      out += kk;
      out += ',';
      out += text::format_double(c.t);
      out += ',';
      out += text::format_double(c.value);
      out += '\n';
    }
  }
  return out;
}

}  // namespace tda
