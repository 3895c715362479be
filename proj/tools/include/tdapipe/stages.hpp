#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tda/classify.hpp"
#include "tda/persistence.hpp"
#include "tda/pointcloud.hpp"
#include "tda/stats.hpp"
#include "tda/summaries.hpp"

namespace tdapipe {

enum class Scale { diameter, radius };

std::string to_string(Scale s);
Scale parse_scale(const std::string& name);
tda::SubsampleStrategy parse_strategy(const std::string& name);
/// "standard" or "dual"; returns true for dual.
bool parse_reduction(const std::string& name);
std::string to_string(tda::SubsampleStrategy s);

struct PersistSettings {
  int max_degree = 1;
  int max_dim = -1;                 // -1: max_degree + 1
  std::optional<double> max_value;  // empty: enclosing radius
  Scale scale = Scale::diameter;
  std::size_t subsample = 0;        // 0: keep every point
  tda::SubsampleStrategy strategy = tda::SubsampleStrategy::maxmin;
  bool dual = false;  // reduce the coboundary matrix (same diagrams)
};

/// Diagrams of degrees 0..max_degree of one cloud. `seed` only feeds the
/// subsampler.
std::vector<tda::PersistenceDiagram> persist_cloud(const tda::PointCloud& cloud,
                                                   const PersistSettings& settings,
                                                   std::uint64_t seed);

struct CloudSummary {
  tda::FeatureVector death;
  tda::FeatureVector landscape;
  tda::PersistenceLandscape exact;
};

/// Death vector of the H0 diagram and the vectorized landscape of the
/// diagram of `landscape_degree` (empty if that degree is absent).
CloudSummary summarize_diagrams(const std::vector<tda::PersistenceDiagram>& diagrams,
                                const tda::LandscapeGrid& grid, int landscape_degree);

/// Reads a death or landscape vector file, telling them apart by the
/// column count.
tda::FeatureVector load_feature_vector(const std::filesystem::path& path);

/// Applies the exclusion that matches the vectors' kind, then zero-pads
/// death vectors to a common length.
std::vector<tda::FeatureVector> prepare_for_test(std::vector<tda::FeatureVector> vectors,
                                                 std::size_t drop_death,
                                                 std::size_t drop_landscape);

/// Runs fn(i) for i in [0, n) on up to `jobs` threads. The first exception
/// thrown by any call is rethrown after all threads finish.
void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn);

/// FNV-1a 64-bit digest as 16 hex digits.
std::string checksum(std::string_view bytes);

std::string diagram_svg(const tda::PersistenceDiagram& diagram);
std::string landscape_svg(const tda::PersistenceLandscape& ls, std::size_t max_functions = 10);
/// Line plot of a vectorized landscape, one polyline per function.
std::string grid_vector_svg(const tda::FeatureVector& v, std::size_t max_functions = 10);

}  // namespace tdapipe
