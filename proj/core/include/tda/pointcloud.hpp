#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace tda {

/// Finite sample of points in R^dim, stored row-major.
class PointCloud {
 public:
  /// `coords` holds n*dim values. Throws ArgumentError when dim is zero, the
  /// length is not a multiple of dim, or a coordinate is not finite.
  PointCloud(std::size_t dim, std::vector<double> coords,
             std::optional<std::string> label = std::nullopt);

  static PointCloud from_rows(const std::vector<std::vector<double>>& rows,
                              std::optional<std::string> label = std::nullopt);

  std::size_t size() const noexcept { return coords_.size() / dim_; }
  bool empty() const noexcept { return coords_.empty(); }
  std::size_t dim() const noexcept { return dim_; }

  std::span<const double> point(std::size_t i) const {
    return {coords_.data() + i * dim_, dim_};
  }
  std::span<const double> coords() const noexcept { return coords_; }

  const std::optional<std::string>& label() const noexcept { return label_; }
  void set_label(std::optional<std::string> label) { label_ = std::move(label); }

  friend bool operator==(const PointCloud&, const PointCloud&) = default;

 private:
  std::size_t dim_;
  std::vector<double> coords_;
  std::optional<std::string> label_;
};

/// Symmetric n x n matrix of pairwise distances with zero diagonal.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  /// Takes ownership of a row-major n*n buffer; only checks the shape.
  DistanceMatrix(std::size_t n, std::vector<double> entries);

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const {
    return entries_[i * n_ + j];
  }
  std::span<const double> row(std::size_t i) const {
    return {entries_.data() + i * n_, n_};
  }
  std::span<const double> entries() const noexcept { return entries_; }

 private:
  std::size_t n_ = 0;
  std::vector<double> entries_;
};

struct CsvOptions {
  bool header = false;  // skip the first line
};

/// One point per line, comma-separated decimal coordinates. Blank lines are
/// ignored. Throws ParseError (with line number) on bad rows and
/// EmptyInputError when no rows remain.
PointCloud parse_point_cloud(std::istream& in, CsvOptions options = {});
PointCloud load_point_cloud(const std::filesystem::path& path,
                            CsvOptions options = {});

std::string point_cloud_csv(const PointCloud& cloud);
std::string distance_matrix_csv(const DistanceMatrix& dm);

/// Euclidean distances. Requires a nonempty cloud.
DistanceMatrix pairwise_distances(const PointCloud& cloud);

// Generators. Noise is isotropic Gaussian with standard deviation noise_sd in
// every coordinate; outliers are uniform in the axis-aligned bounding box of
// the noise-free shape and are appended after the shape points.

/// n points at angles 2*pi*i/n (starting at angle 0) on a circle centred at
/// the origin, in the plane.
PointCloud sample_circle(std::size_t n, double radius, double noise_sd,
                         std::uint64_t seed, std::size_t outliers = 0);

/// k circles of equal radius, all tangent at the origin (the wedge point).
/// k == 1 is exactly sample_circle. For k >= 2 the cloud lives in R^3:
/// circle c lies in the vertical plane at azimuth 2*pi*c/k, centred at
/// radius*(cos, sin, 0) of that azimuth, so distinct circles meet only at the
/// origin and share the common tangent line (the z axis) there. Every circle
/// contributes n_per_circle points, the first of which is the wedge point.
PointCloud sample_wedge_of_circles(std::size_t k, std::size_t n_per_circle,
                                   double radius, double noise_sd,
                                   std::uint64_t seed,
                                   std::size_t outliers = 0);

/// Same wedge with circle c drawn from counts[c] points (each >= 3).
PointCloud sample_wedge_of_circles(std::span<const std::size_t> counts,
                                   double radius, double noise_sd,
                                   std::uint64_t seed,
                                   std::size_t outliers = 0);

/// Splits `total` points over k circles as evenly as possible, earlier
/// circles taking the remainder.
std::vector<std::size_t> wedge_counts(std::size_t k, std::size_t total);

enum class SubsampleStrategy { random, maxmin };

/// Greedy farthest-point order starting at `start`; ties go to the lower
/// index. Returns m indices in selection order.
std::vector<std::size_t> maxmin_indices(const DistanceMatrix& dm, std::size_t m,
                                        std::size_t start);

/// m points of the cloud. `random` keeps the original relative order;
/// `maxmin` returns points in selection order, starting from a point chosen
/// by the seed.
PointCloud subsample(const PointCloud& cloud, std::size_t m,
                     SubsampleStrategy strategy, std::uint64_t seed);

}  // namespace tda
