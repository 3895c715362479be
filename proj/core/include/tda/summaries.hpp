#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tda/persistence.hpp"

namespace tda {

/// Finite degree-0 deaths of a Rips diagram, largest first.
struct DeathVector {
  std::vector<double> deaths;
};

/// Throws InvalidInputError unless the diagram has degree 0 and every
/// birth is 0. The essential class is left out.
DeathVector death_vector(const PersistenceDiagram& diagram);

/// Drops the `drop_first` largest deaths, then keeps `keep` entries,
/// padding with zeros when fewer remain.
DeathVector truncate_death_vector(const DeathVector& dv, std::size_t drop_first,
                                  std::size_t keep);

/// Tent function of the point (b, d): t - b on [b, (b+d)/2), d - t on
/// [(b+d)/2, d), 0 elsewhere. Throws ArgumentError unless b < d.
double triangle_function(double b, double d, double t);

struct CriticalPoint {
  double t = 0.0;
  double value = 0.0;
  friend bool operator==(const CriticalPoint&, const CriticalPoint&) = default;
};

/// Persistence landscape as exact piecewise-linear functions. Function k
/// (0-based here, lambda_{k+1} in the usual numbering) is the linear
/// interpolation of its critical points, with value 0 outside their span.
class PersistenceLandscape {
 public:
  /// The tent line a segment lies on: t - c (rising), c - t (falling), 0
  /// (flat), or plain interpolation of its end points when unknown.
  struct Segment {
    enum class Kind : unsigned char { rising, falling, zero, interpolate };
    Kind kind = Kind::interpolate;
    double c = 0.0;
  };

  PersistenceLandscape() = default;
  /// Segments are evaluated by interpolating the critical points.
  explicit PersistenceLandscape(std::vector<std::vector<CriticalPoint>> functions);
  /// `segments[k][i]` describes the piece between points i and i+1 of
  /// function k. Evaluating a known line directly rounds once, so values
  /// equal the correctly rounded landscape and keep its pointwise order.
  PersistenceLandscape(std::vector<std::vector<CriticalPoint>> functions,
                       std::vector<std::vector<Segment>> segments);

  std::size_t size() const noexcept { return functions_.size(); }
  bool empty() const noexcept { return functions_.empty(); }
  std::span<const CriticalPoint> function(std::size_t k) const {
    return functions_[k];
  }

  /// lambda_{k+1}(t); zero when k >= size().
  double evaluate(std::size_t k, double t) const;

  /// Function k alone at t, before the order is enforced across functions.
  double piece_value(std::size_t k, double t) const;

  /// Equal critical points; the segment annotation is not compared.
  friend bool operator==(const PersistenceLandscape& a, const PersistenceLandscape& b) {
    return a.functions_ == b.functions_;
  }

  /// Removes the first `drop_first` functions.
  PersistenceLandscape without_first(std::size_t drop_first) const;

 private:
  std::vector<std::vector<CriticalPoint>> functions_;
  std::vector<std::vector<Segment>> segments_;
};

/// Exact landscape of the diagram's finite points; essentials are ignored.
PersistenceLandscape landscape(const PersistenceDiagram& diagram);
PersistenceLandscape landscape(std::span<const PersistencePair> points);

/// Removes the first `drop_first` functions.
PersistenceLandscape drop_landscape_functions(const PersistenceLandscape& ls,
                                              std::size_t drop_first);

/// Evaluation grid a, a + delta, ..., a + m*delta for lambda_1..lambda_K.
struct LandscapeGrid {
  std::size_t functions = 60;  // K
  double start = 0.0;          // a
  double step = 0.1;           // delta
  std::size_t steps = 400;     // m

  std::size_t points() const noexcept { return steps + 1; }
  std::size_t length() const noexcept { return functions * points(); }
  double at(std::size_t i) const noexcept {
    return start + static_cast<double>(i) * step;
  }
  friend bool operator==(const LandscapeGrid&, const LandscapeGrid&) = default;
};

enum class FeatureKind { death, landscape, concatenated };

std::string to_string(FeatureKind kind);

/// Flat real vector fed to the statistics and the classifier.
struct FeatureVector {
  std::vector<double> values;
  FeatureKind kind = FeatureKind::landscape;
  std::optional<LandscapeGrid> grid;  // set for landscape vectors

  std::size_t size() const noexcept { return values.size(); }
  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

FeatureVector to_feature_vector(const DeathVector& dv);

/// k-major concatenation of lambda_1..lambda_K on the grid; length K(m+1).
/// Throws ArgumentError for K == 0 or a non-positive step.
FeatureVector vectorize_landscape(const PersistenceLandscape& ls,
                                  const LandscapeGrid& grid);

/// Coordinatewise mean; throws ArgumentError on an empty group or a length
/// mismatch. Kind and grid come from the first vector.
FeatureVector mean_vectors(std::span<const FeatureVector> group);

/// Coordinatewise a - b; throws ArgumentError on a length mismatch.
FeatureVector diff_vectors(const FeatureVector& a, const FeatureVector& b);

/// Pads every vector with zeros to the longest length in the set.
std::vector<FeatureVector> pad_to_common_length(std::vector<FeatureVector> vectors);

// File formats.

/// `[[[t, value], ...], ...]`, one array per landscape function.
std::string landscape_json(const PersistenceLandscape& ls);
PersistenceLandscape parse_landscape_json(std::string_view json);

/// `k,t,value` rows with 1-based k, k-major.
std::string landscape_grid_csv(const FeatureVector& v);
/// Recovers values and grid from landscape_grid_csv output.
FeatureVector parse_landscape_grid_csv(std::string_view csv);

/// One value per line.
std::string death_vector_csv(const FeatureVector& v);
FeatureVector parse_death_vector_csv(std::string_view csv);

/// Critical points as `k,t,value` polylines, for plotting.
std::string landscape_polyline_csv(const PersistenceLandscape& ls);

}  // namespace tda
