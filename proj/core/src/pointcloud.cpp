#include "tda/pointcloud.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numbers>
#include <string>

#include "tda/error.hpp"
#include "tda/random.hpp"
#include "tda/text.hpp"

namespace tda {

PointCloud::PointCloud(std::size_t dim, std::vector<double> coords,
                       std::optional<std::string> label)
    : dim_(dim), coords_(std::move(coords)), label_(std::move(label)) {
  if (dim_ == 0) throw ArgumentError("point cloud dimension must be positive");
  if (coords_.size() % dim_ != 0) {
    throw ArgumentError("coordinate count is not a multiple of the dimension");
  }
  for (double c : coords_) {
    if (!std::isfinite(c)) throw ArgumentError("non-finite coordinate");
  }
}

PointCloud PointCloud::from_rows(const std::vector<std::vector<double>>& rows,
                                 std::optional<std::string> label) {
  if (rows.empty()) throw ArgumentError("from_rows needs at least one row");
  const std::size_t dim = rows.front().size();
  std::vector<double> coords;
  coords.reserve(rows.size() * dim);
  for (const auto& r : rows) {
    if (r.size() != dim) throw ArgumentError("rows differ in dimension");
    coords.insert(coords.end(), r.begin(), r.end());
  }
  return PointCloud(dim, std::move(coords), std::move(label));
}

DistanceMatrix::DistanceMatrix(std::size_t n, std::vector<double> entries)
    : n_(n), entries_(std::move(entries)) {
  if (entries_.size() != n_ * n_) {
    throw ArgumentError("distance matrix buffer has the wrong size");
  }
}

PointCloud parse_point_cloud(std::istream& in, CsvOptions options) {
  std::vector<double> coords;
  std::size_t dim = 0;
  std::size_t line_no = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (options.header && line_no == 1) continue;
    const std::string_view body = text::trim(line);
    if (body.empty()) continue;
    const auto fields = text::split(body, ',');
    if (dim == 0) {
      dim = fields.size();
    } else if (fields.size() != dim) {
      throw ParseError("expected " + std::to_string(dim) + " coordinates, got " +
                           std::to_string(fields.size()),
                       line_no);
    }
    for (auto f : fields) {
      const auto v = text::parse_double(f);
      if (!v || !std::isfinite(*v)) {
        throw ParseError("not a finite number: '" + std::string(text::trim(f)) +
                             "'",
                         line_no);
      }
      coords.push_back(*v);
    }
  }
  if (coords.empty()) throw EmptyInputError("point cloud file has no rows");
  return PointCloud(dim, std::move(coords));
}

PointCloud load_point_cloud(const std::filesystem::path& path,
                            CsvOptions options) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return parse_point_cloud(in, options);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), 0);
  } catch (const EmptyInputError&) {
    throw EmptyInputError(path.string() + ": point cloud file has no rows");
  }
}

std::string point_cloud_csv(const PointCloud& cloud) {
  std::string out;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto p = cloud.point(i);
    for (std::size_t c = 0; c < p.size(); ++c) {
      if (c) out += ',';
      out += text::format_double(p[c]);
    }
    out += '\n';
  }
  return out;
}

std::string distance_matrix_csv(const DistanceMatrix& dm) {
  std::string out;
  for (std::size_t i = 0; i < dm.size(); ++i) {
    for (std::size_t j = 0; j < dm.size(); ++j) {
      if (j) out += ',';
      out += text::format_double(dm(i, j));
    }
    out += '\n';
  }
  return out;
}

namespace {

double euclidean(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    s += d * d;
  }
  return std::sqrt(s);
}

void check_generator_args(double radius, double noise_sd) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw ArgumentError("radius must be positive");
  }
  if (!(noise_sd >= 0.0) || !std::isfinite(noise_sd)) {
    throw ArgumentError("noise_sd must be non-negative");
  }
}

// Perturbs the clean shape in place, then appends uniform outliers drawn from
// its bounding box. Noise is drawn point by point, coordinate by coordinate.
void add_noise_and_outliers(std::vector<double>& coords, std::size_t dim,
                            double noise_sd, std::size_t outliers, Rng& rng) {
  std::vector<double> lo(dim, std::numeric_limits<double>::infinity());
  std::vector<double> hi(dim, -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < coords.size(); ++i) {
    lo[i % dim] = std::min(lo[i % dim], coords[i]);
    hi[i % dim] = std::max(hi[i % dim], coords[i]);
  }
  if (noise_sd > 0.0) {
    for (double& c : coords) c += noise_sd * rng.normal();
  }
  for (std::size_t o = 0; o < outliers; ++o) {
    for (std::size_t k = 0; k < dim; ++k) {
      coords.push_back(rng.uniform(lo[k], hi[k]));
    }
  }
}

template <class Dist>
std::vector<std::size_t> farthest_point_order(std::size_t n, std::size_t m,
                                              std::size_t start, Dist dist) {
  std::vector<std::size_t> chosen;
  chosen.reserve(m);
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  std::vector<bool> taken(n, false);
  std::size_t next = start;
  while (chosen.size() < m) {
    chosen.push_back(next);
    taken[next] = true;
    std::size_t best = n;
    double best_d = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (taken[i]) continue;
      nearest[i] = std::min(nearest[i], dist(next, i));
      if (nearest[i] > best_d) {
        best_d = nearest[i];
        best = i;
      }
    }
    next = best;
  }
  return chosen;
}

}  // namespace

DistanceMatrix pairwise_distances(const PointCloud& cloud) {
  const std::size_t n = cloud.size();
  if (n == 0) throw ArgumentError("pairwise_distances needs at least one point");
  std::vector<double> e(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto pi = cloud.point(i);
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = euclidean(pi, cloud.point(j));
      e[i * n + j] = d;
      e[j * n + i] = d;
    }
  }
  return DistanceMatrix(n, std::move(e));
}

PointCloud sample_circle(std::size_t n, double radius, double noise_sd,
                         std::uint64_t seed, std::size_t outliers) {
  check_generator_args(radius, noise_sd);
  if (n < 1) throw ArgumentError("sample_circle needs n >= 1");
  std::vector<double> coords;
  coords.reserve(2 * (n + outliers));
  for (std::size_t i = 0; i < n; ++i) {
    const double angle =
        2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
    coords.push_back(radius * std::cos(angle));
    coords.push_back(radius * std::sin(angle));
  }
  Rng rng(seed);
  add_noise_and_outliers(coords, 2, noise_sd, outliers, rng);
  return PointCloud(2, std::move(coords));
}

PointCloud sample_wedge_of_circles(std::size_t k, std::size_t n_per_circle,
                                   double radius, double noise_sd,
                                   std::uint64_t seed, std::size_t outliers) {
  if (k < 1) throw ArgumentError("wedge needs at least one circle");
  const std::vector<std::size_t> counts(k, n_per_circle);
  return sample_wedge_of_circles(counts, radius, noise_sd, seed, outliers);
}

PointCloud sample_wedge_of_circles(std::span<const std::size_t> counts, double radius,
                                   double noise_sd, std::uint64_t seed,
                                   std::size_t outliers) {
  check_generator_args(radius, noise_sd);
  const std::size_t k = counts.size();
  if (k < 1) throw ArgumentError("wedge needs at least one circle");
  std::size_t total = 0;
  for (std::size_t n : counts) {
    if (n < 3) throw ArgumentError("wedge needs at least 3 points per circle");
    total += n;
  }
  if (k == 1) {
    return sample_circle(counts[0], radius, noise_sd, seed, outliers);
  }
  std::vector<double> coords;
  coords.reserve(3 * (total + outliers));
  for (std::size_t c = 0; c < k; ++c) {
    const double azimuth =
        2.0 * std::numbers::pi * static_cast<double>(c) / static_cast<double>(k);
    const double ux = std::cos(azimuth);
    const double uy = std::sin(azimuth);
    for (std::size_t i = 0; i < counts[c]; ++i) {
      if (i == 0) {
        coords.insert(coords.end(), {0.0, 0.0, 0.0});
        continue;
      }
      // Angle measured from the centre; phase pi puts i == 0 at the origin.
      const double phi = std::numbers::pi + 2.0 * std::numbers::pi *
                                                static_cast<double>(i) /
                                                static_cast<double>(counts[c]);
      const double radial = radius * (1.0 + std::cos(phi));
      coords.push_back(radial * ux);
      coords.push_back(radial * uy);
      coords.push_back(radius * std::sin(phi));
    }
  }
  Rng rng(seed);
  add_noise_and_outliers(coords, 3, noise_sd, outliers, rng);
  return PointCloud(3, std::move(coords));
}

std::vector<std::size_t> wedge_counts(std::size_t k, std::size_t total) {
  if (k < 1) throw ArgumentError("wedge needs at least one circle");
  std::vector<std::size_t> counts(k, total / k);
  for (std::size_t c = 0; c < total % k; ++c) ++counts[c];
  return counts;
}

std::vector<std::size_t> maxmin_indices(const DistanceMatrix& dm, std::size_t m,
                                        std::size_t start) {
  if (m < 1 || m > dm.size()) throw ArgumentError("maxmin: need 1 <= m <= n");
  if (start >= dm.size()) throw ArgumentError("maxmin: start out of range");
  return farthest_point_order(dm.size(), m, start,
                              [&](std::size_t a, std::size_t b) { return dm(a, b); });
}

PointCloud subsample(const PointCloud& cloud, std::size_t m,
                     SubsampleStrategy strategy, std::uint64_t seed) {
  const std::size_t n = cloud.size();
  if (m < 1 || m > n) {
    throw ArgumentError("subsample: need 1 <= m <= n (m=" + std::to_string(m) +
                        ", n=" + std::to_string(n) + ")");
  }
  Rng rng(seed);
  std::vector<std::size_t> idx;
  if (strategy == SubsampleStrategy::random) {
    idx.resize(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    // Partial Fisher-Yates: the first m slots become a uniform m-subset.
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
      std::swap(idx[i], idx[j]);
    }
    idx.resize(m);
    std::sort(idx.begin(), idx.end());
  } else {
    const auto start = static_cast<std::size_t>(rng.below(n));
    idx = farthest_point_order(n, m, start, [&](std::size_t a, std::size_t b) {
      return euclidean(cloud.point(a), cloud.point(b));
    });
  }
  std::vector<double> coords;
  coords.reserve(m * cloud.dim());
  for (std::size_t i : idx) {
    const auto p = cloud.point(i);
    coords.insert(coords.end(), p.begin(), p.end());
  }
  return PointCloud(cloud.dim(), std::move(coords), cloud.label());
}

}  // namespace tda
