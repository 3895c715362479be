#include "tdapipe/stages.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <mutex>
#include <thread>

#include "tda/complex.hpp"
#include "tda/error.hpp"
#include "tda/text.hpp"

namespace tdapipe {

std::string to_string(Scale s) { return s == Scale::radius ? "radius" : "diameter"; }

Scale parse_scale(const std::string& name) {
  if (name == "diameter") return Scale::diameter;
  if (name == "radius") return Scale::radius;
  throw tda::ArgumentError("scale must be diameter or radius, got '" + name + "'");
}

tda::SubsampleStrategy parse_strategy(const std::string& name) {
  if (name == "random") return tda::SubsampleStrategy::random;
  if (name == "maxmin") return tda::SubsampleStrategy::maxmin;
  throw tda::ArgumentError("strategy must be random or maxmin, got '" + name + "'");
}

bool parse_reduction(const std::string& name) {
  if (name == "standard") return false;
  if (name == "dual") return true;
  throw tda::ArgumentError("reduction must be standard or dual, got '" + name + "'");
}

std::string to_string(tda::SubsampleStrategy s) {
  return s == tda::SubsampleStrategy::random ? "random" : "maxmin";
}

std::vector<tda::PersistenceDiagram> persist_cloud(const tda::PointCloud& cloud,
                                                   const PersistSettings& settings,
                                                   std::uint64_t seed) {
  if (settings.max_degree < 0) throw tda::ArgumentError("max degree must be >= 0");
  const int max_dim = settings.max_dim < 0 ? settings.max_degree + 1 : settings.max_dim;
  const tda::PointCloud* source = &cloud;
  std::optional<tda::PointCloud> reduced;
  if (settings.subsample > 0 && settings.subsample < cloud.size()) {
    reduced = tda::subsample(cloud, settings.subsample, settings.strategy, seed);
    source = &*reduced;
  }
  const tda::DistanceMatrix dm = tda::pairwise_distances(*source);
  const double max_value = settings.max_value ? *settings.max_value : tda::enclosing_radius(dm);
  const tda::Filtration f = tda::vietoris_rips(dm, max_dim, max_value);
  tda::ReduceOptions options;
  options.dual = settings.dual;
  auto out = tda::diagrams(f, settings.max_degree, options);
  if (settings.scale == Scale::radius) {
    for (auto& d : out) d = tda::rescale(d, 0.5);
  }
  return out;
}

CloudSummary summarize_diagrams(const std::vector<tda::PersistenceDiagram>& diagrams,
                                const tda::LandscapeGrid& grid, int landscape_degree) {
  if (diagrams.empty()) throw tda::InvalidInputError("no H0 diagram");
  CloudSummary s;
  s.death = tda::to_feature_vector(tda::death_vector(diagrams.front()));
  if (landscape_degree >= 0 && static_cast<std::size_t>(landscape_degree) < diagrams.size()) {
    s.exact = tda::landscape(diagrams[static_cast<std::size_t>(landscape_degree)]);
  }
  s.landscape = tda::vectorize_landscape(s.exact, grid);
  return s;
}

tda::FeatureVector load_feature_vector(const std::filesystem::path& path) {
  const std::string content = tda::text::read_file(path);
  for (auto line : tda::text::split(content, '\n')) {
    line = tda::text::trim(line);
    if (line.empty()) continue;
    if (tda::text::split(line, ',').size() == 3) return tda::parse_landscape_grid_csv(content);
    break;
  }
  return tda::parse_death_vector_csv(content);
}

std::vector<tda::FeatureVector> prepare_for_test(std::vector<tda::FeatureVector> vectors,
                                                 std::size_t drop_death,
                                                 std::size_t drop_landscape) {
  if (vectors.empty()) return vectors;
  const tda::FeatureKind kind = vectors.front().kind;
  for (const auto& v : vectors) {
    if (v.kind != kind) throw tda::InvalidInputError("mixed death and landscape vectors");
  }
  tda::Exclusion e;
  if (kind == tda::FeatureKind::death) {
    e = {tda::Exclusion::Mode::drop_death_coords, drop_death};
  } else {
    e = {tda::Exclusion::Mode::drop_landscape_functions, drop_landscape};
  }
  if (e.count > 0) vectors = tda::preprocess_exclusion(vectors, e);
  if (kind == tda::FeatureKind::death) vectors = tda::pad_to_common_length(std::move(vectors));
  return vectors;
}

void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn) {
  jobs = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(n, 1));
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> workers;
  for (std::size_t w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : workers) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::string checksum(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

constexpr double kWidth = 480, kHeight = 360, kMargin = 40;

struct Frame {
  double x0, x1, y0, y1;
  double px(double x) const { return kMargin + (x - x0) / (x1 - x0) * (kWidth - 2 * kMargin); }
  double py(double y) const {
    return kHeight - kMargin - (y - y0) / (y1 - y0) * (kHeight - 2 * kMargin);
  }
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string header(const Frame& f, const std::string& title) {
  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) +
                  "\" height=\"" + num(kHeight) + "\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + num(kWidth / 2) + "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" +
       title + "</text>\n";
  s += "<path d=\"M" + num(f.px(f.x0)) + "," + num(f.py(f.y1)) + " V" + num(f.py(f.y0)) +
       " H" + num(f.px(f.x1)) + "\" stroke=\"black\" fill=\"none\"/>\n";
  s += "<text x=\"" + num(f.px(f.x1)) + "\" y=\"" + num(kHeight - 12) +
       "\" text-anchor=\"end\" font-size=\"11\">" + tda::text::format_double(f.x1) + "</text>\n";
  s += "<text x=\"4\" y=\"" + num(f.py(f.y1) + 4) + "\" font-size=\"11\">" +
       tda::text::format_double(f.y1) + "</text>\n";
  return s;
}

const char* colour(std::size_t k) {
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  return palette[k % 10];
}

double nice_max(double v) { return v > 0 ? v * 1.05 : 1.0; }

}  // namespace

std::string diagram_svg(const tda::PersistenceDiagram& diagram) {
  double hi = 0;
  for (const auto& p : diagram.points()) hi = std::max(hi, p.death);
  for (double b : diagram.essentials()) hi = std::max(hi, b);
  hi = nice_max(hi);
  const Frame f{0, hi, 0, hi};
  std::string s = header(f, "H" + std::to_string(diagram.degree()) + " diagram");
  s += "<line x1=\"" + num(f.px(0)) + "\" y1=\"" + num(f.py(0)) + "\" x2=\"" + num(f.px(hi)) +
       "\" y2=\"" + num(f.py(hi)) + "\" stroke=\"#999\"/>\n";
  for (const auto& p : diagram.points()) {
    s += "<circle cx=\"" + num(f.px(p.birth)) + "\" cy=\"" + num(f.py(p.death)) +
         "\" r=\"3\" fill=\"#1f77b4\"/>\n";
  }
  for (double b : diagram.essentials()) {
    s += "<path d=\"M" + num(f.px(b) - 4) + "," + num(f.py(hi) + 4) + " l4,-8 l4,8 z\" fill=\"#d62728\"/>\n";
  }
  return s + "</svg>\n";
}

std::string landscape_svg(const tda::PersistenceLandscape& ls, std::size_t max_functions) {
  double x_lo = 0, x_hi = 0, y_hi = 0;
  bool first = true;
  for (std::size_t k = 0; k < ls.size(); ++k) {
    for (const auto& c : ls.function(k)) {
      if (first) x_lo = x_hi = c.t;
      first = false;
      x_lo = std::min(x_lo, c.t);
      x_hi = std::max(x_hi, c.t);
      y_hi = std::max(y_hi, c.value);
    }
  }
  if (x_hi <= x_lo) x_hi = x_lo + 1;
  const Frame f{x_lo, x_hi, 0, nice_max(y_hi)};
  std::string s = header(f, "landscape");
  for (std::size_t k = 0; k < std::min(ls.size(), max_functions); ++k) {
    std::string d;
    for (const auto& c : ls.function(k)) {
      d += (d.empty() ? "M" : " L") + num(f.px(c.t)) + "," + num(f.py(c.value));
    }
    s += "<path d=\"" + d + "\" stroke=\"" + colour(k) + "\" fill=\"none\"/>\n";
  }
  return s + "</svg>\n";
}

std::string grid_vector_svg(const tda::FeatureVector& v, std::size_t max_functions) {
  if (!v.grid) throw tda::ArgumentError("grid_vector_svg: vector has no grid");
  const auto& g = *v.grid;
  double y_lo = 0, y_hi = 0;
  for (double x : v.values) {
    y_lo = std::min(y_lo, x);
    y_hi = std::max(y_hi, x);
  }
  if (y_hi <= y_lo) y_hi = y_lo + 1;
  const Frame f{g.at(0), g.at(g.steps) > g.at(0) ? g.at(g.steps) : g.at(0) + 1, y_lo, y_hi};
  std::string s = header(f, "vectorized landscape");
  for (std::size_t k = 0; k < std::min(g.functions, max_functions); ++k) {
    std::string d;
    for (std::size_t i = 0; i < g.points(); ++i) {
      d += (i ? " L" : "M") + num(f.px(g.at(i))) + "," + num(f.py(v.values[k * g.points() + i]));
    }
    s += "<path d=\"" + d + "\" stroke=\"" + colour(k) + "\" fill=\"none\"/>\n";
  }
  return s + "</svg>\n";
}

}  // namespace tdapipe
