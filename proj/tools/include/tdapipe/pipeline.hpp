#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tdapipe/stages.hpp"

namespace tdapipe {

/// Every parameter of an end-to-end run. Serialized as a flat JSON object
/// whose keys are the member names.
struct PipelineConfig {
  // Ingestion: CSV clouds per group, or the generator when both are empty.
  std::vector<std::string> input_a;
  std::vector<std::string> input_b;
  bool header = false;
  std::string shape_a = "wedge";  // wedge | circle
  std::string shape_b = "wedge";
  std::size_t k_a = 2;  // circles in the wedge
  std::size_t k_b = 3;
  std::size_t count_a = 10;
  std::size_t count_b = 10;
  std::size_t points = 100;  // per cloud before outliers
  double radius_a = 1.0;
  double radius_b = 1.0;
  double noise_sd = 0.05;
  std::size_t outliers = 5;

  std::size_t subsample = 0;
  std::string strategy = "maxmin";

  int max_dim = -1;
  std::optional<double> max_value;  // JSON "auto" or absent: enclosing radius
  std::string scale = "diameter";
  int max_degree = 1;
  int landscape_degree = 1;
  std::string reduction = "standard";  // standard | dual

  std::size_t k = 60;
  double a = 0.0;
  double delta = 0.1;
  std::size_t m = 400;

  std::size_t drop_death = 3;
  std::size_t drop_landscape = 20;
  std::string statistic = "l2";
  std::size_t permutations = 9999;
  std::uint64_t exhaustive_threshold = 200000;

  std::size_t folds = 10;
  double lambda = 1e-3;
  std::size_t epochs = 0;
  bool use_death_vector = true;

  std::uint64_t seed = 20240601;
  std::string out_dir = "run";
  std::size_t jobs = 1;  // affects speed only; not recorded

  PersistSettings persist_settings() const;
  tda::LandscapeGrid grid() const;
};

/// Parses a flat JSON object. Unknown keys and mistyped values throw
/// ArgumentError.
PipelineConfig parse_pipeline_config(std::string_view json);
PipelineConfig load_pipeline_config(const std::filesystem::path& path);

/// Applies `key=value` (value read as JSON when it parses, else as a string).
void apply_override(PipelineConfig& config, const std::string& assignment);

/// Checks the invariants listed on each field; throws ArgumentError.
void validate(const PipelineConfig& config);

/// Ordered JSON of every recorded parameter.
std::string config_json(const PipelineConfig& config);

struct TestOutcome {
  std::string name;
  tda::PermutationTestResult result;
  std::vector<tda::Exclusion> exclusions;
};

struct PipelineResult {
  std::filesystem::path out_dir;
  std::vector<TestOutcome> tests;
  tda::CrossValidationReport cv;
  std::map<std::string, std::string> outputs;  // relative path -> checksum
  std::string manifest;
};

/// Synthetic cloud `index` of group 0 (A) or 1 (B), seeded from config.seed
/// exactly as run_pipeline seeds it.
tda::PointCloud generate_cloud(const PipelineConfig& config, std::size_t group,
                               std::size_t index);

/// generate/ingest -> persist -> summarize -> test -> classify, writing the
/// run directory and its manifest.json. Progress lines go to `log`.
PipelineResult run_pipeline(const PipelineConfig& config, std::ostream& log);

}  // namespace tdapipe
