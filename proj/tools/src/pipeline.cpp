#include "tdapipe/pipeline.hpp"

#include <cmath>
#include <functional>
#include <mutex>
#include <nlohmann/json.hpp>
#include <ostream>

#include "tda/error.hpp"
#include "tda/random.hpp"
#include "tda/text.hpp"

namespace tdapipe {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

std::size_t as_size(const json& j, const std::string& key) {
  const bool ok = j.is_number_unsigned() || (j.is_number_integer() && j.get<std::int64_t>() >= 0);
  if (!ok) throw tda::ArgumentError(key + ": expected a non-negative integer");
  return j.get<std::size_t>();
}

int as_int(const json& j, const std::string& key) {
  if (!j.is_number_integer()) throw tda::ArgumentError(key + ": expected an integer");
  return j.get<int>();
}

double as_double(const json& j, const std::string& key) {
  if (!j.is_number()) throw tda::ArgumentError(key + ": expected a number");
  return j.get<double>();
}

bool as_bool(const json& j, const std::string& key) {
  if (!j.is_boolean()) throw tda::ArgumentError(key + ": expected true or false");
  return j.get<bool>();
}

std::string as_string(const json& j, const std::string& key) {
  if (!j.is_string()) throw tda::ArgumentError(key + ": expected a string");
  return j.get<std::string>();
}

std::vector<std::string> as_strings(const json& j, const std::string& key) {
  if (!j.is_array()) throw tda::ArgumentError(key + ": expected an array of paths");
  std::vector<std::string> out;
  for (const auto& e : j) out.push_back(as_string(e, key));
  return out;
}

struct Field {
  const char* name;
  std::function<void(const json&)> set;
  std::function<json()> get;
  bool recorded = true;
};

std::vector<Field> fields(PipelineConfig& c) {
  std::vector<Field> f;
  auto size_field = [&](const char* name, std::size_t& v) {
    f.push_back({name, [&v, name](const json& j) { v = as_size(j, name); }, [&v] { return json(v); }});
  };
  auto double_field = [&](const char* name, double& v) {
    f.push_back({name, [&v, name](const json& j) { v = as_double(j, name); }, [&v] { return json(v); }});
  };
  auto string_field = [&](const char* name, std::string& v) {
    f.push_back({name, [&v, name](const json& j) { v = as_string(j, name); }, [&v] { return json(v); }});
  };
  auto int_field = [&](const char* name, int& v) {
    f.push_back({name, [&v, name](const json& j) { v = as_int(j, name); }, [&v] { return json(v); }});
  };
  auto list_field = [&](const char* name, std::vector<std::string>& v) {
    f.push_back({name, [&v, name](const json& j) { v = as_strings(j, name); }, [&v] { return json(v); }});
  };

  list_field("input_a", c.input_a);
  list_field("input_b", c.input_b);
  f.push_back({"header", [&c](const json& j) { c.header = as_bool(j, "header"); },
               [&c] { return json(c.header); }});
  string_field("shape_a", c.shape_a);
  string_field("shape_b", c.shape_b);
  size_field("k_a", c.k_a);
  size_field("k_b", c.k_b);
  size_field("count_a", c.count_a);
  size_field("count_b", c.count_b);
  size_field("points", c.points);
  double_field("radius_a", c.radius_a);
  double_field("radius_b", c.radius_b);
  double_field("noise_sd", c.noise_sd);
  size_field("outliers", c.outliers);
  size_field("subsample", c.subsample);
  string_field("strategy", c.strategy);
  int_field("max_dim", c.max_dim);
  f.push_back({"max_value",
               [&c](const json& j) {
                 if (j.is_null() || (j.is_string() && j.get<std::string>() == "auto")) {
                   c.max_value.reset();
                 } else {
                   c.max_value = as_double(j, "max_value");
                 }
               },
               [&c] { return c.max_value ? json(*c.max_value) : json("auto"); }});
  string_field("scale", c.scale);
  int_field("max_degree", c.max_degree);
  int_field("landscape_degree", c.landscape_degree);
  string_field("reduction", c.reduction);
  size_field("k", c.k);
  double_field("a", c.a);
  double_field("delta", c.delta);
  size_field("m", c.m);
  size_field("drop_death", c.drop_death);
  size_field("drop_landscape", c.drop_landscape);
  string_field("statistic", c.statistic);
  size_field("permutations", c.permutations);
  f.push_back({"exhaustive_threshold",
               [&c](const json& j) { c.exhaustive_threshold = as_size(j, "exhaustive_threshold"); },
               [&c] { return json(c.exhaustive_threshold); }});
  size_field("folds", c.folds);
  double_field("lambda", c.lambda);
  size_field("epochs", c.epochs);
  f.push_back({"use_death_vector",
               [&c](const json& j) { c.use_death_vector = as_bool(j, "use_death_vector"); },
               [&c] { return json(c.use_death_vector); }});
  f.push_back({"seed", [&c](const json& j) { c.seed = as_size(j, "seed"); },
               [&c] { return json(c.seed); }});
  string_field("out_dir", c.out_dir);
  f.push_back({"jobs", [&c](const json& j) { c.jobs = as_size(j, "jobs"); },
               [&c] { return json(c.jobs); }, false});
  return f;
}

void set_field(PipelineConfig& c, const std::string& key, const json& value) {
  for (auto& field : fields(c)) {
    if (key == field.name) {
      field.set(value);
      return;
    }
  }
  throw tda::ArgumentError("unknown config key '" + key + "'");
}

json config_object(const PipelineConfig& config) {
  PipelineConfig copy = config;
  json j = json::object();
  for (auto& field : fields(copy)) {
    if (field.recorded) j[field.name] = field.get();
  }
  return j;
}

// Atomic writer that remembers a checksum for each file, keyed by the path
// relative to the run directory.
class OutputSet {
 public:
  explicit OutputSet(fs::path root) : root_(std::move(root)) {}

  void write(const std::string& rel, const std::string& content) {
    tda::text::write_file_atomic(root_ / rel, content);
    std::lock_guard lock(mutex_);
    sums_[rel] = checksum(content);
  }
  const std::map<std::string, std::string>& sums() const { return sums_; }

 private:
  fs::path root_;
  std::mutex mutex_;
  std::map<std::string, std::string> sums_;
};

std::string cloud_name(std::size_t group, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%c_%03zu", group == 0 ? 'a' : 'b', i);
  return buf;
}

json result_object(const TestOutcome& t) {
  return json::parse(tda::permutation_result_json(t.result, t.exclusions));
}

}  // namespace

PersistSettings PipelineConfig::persist_settings() const {
  PersistSettings s;
  s.max_degree = max_degree;
  s.max_dim = max_dim;
  s.max_value = max_value;
  s.scale = parse_scale(scale);
  s.subsample = subsample;
  s.strategy = parse_strategy(strategy);
  s.dual = parse_reduction(reduction);
  return s;
}

tda::LandscapeGrid PipelineConfig::grid() const { return {k, a, delta, m}; }

PipelineConfig parse_pipeline_config(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw tda::ArgumentError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw tda::ArgumentError("config must be a JSON object");
  PipelineConfig c;
  for (const auto& [key, value] : j.items()) set_field(c, key, value);
  return c;
}

PipelineConfig load_pipeline_config(const fs::path& path) {
  return parse_pipeline_config(tda::text::read_file(path));
}

void apply_override(PipelineConfig& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw tda::ArgumentError("override must look like key=value, got '" + assignment + "'");
  }
  const std::string key = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;
  set_field(config, key, value);
}

void validate(const PipelineConfig& c) {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw tda::ArgumentError("config: " + what);
  };
  require(c.input_a.empty() == c.input_b.empty(), "input_a and input_b must both be given or both empty");
  for (const auto& [shape, k, radius] : {std::tuple{c.shape_a, c.k_a, c.radius_a},
                                         std::tuple{c.shape_b, c.k_b, c.radius_b}}) {
    require(shape == "wedge" || shape == "circle", "shape must be wedge or circle");
    require(k >= 1, "k_a / k_b must be >= 1");
    require(c.points >= 3 * (shape == "wedge" ? k : 1), "points must allow 3 per circle");
    require(radius > 0 && std::isfinite(radius), "radius must be positive");
  }
  if (c.input_a.empty()) require(c.count_a >= 2 && c.count_b >= 2, "each group needs >= 2 clouds");
  require(c.noise_sd >= 0 && std::isfinite(c.noise_sd), "noise_sd must be >= 0");
  parse_strategy(c.strategy);
  parse_scale(c.scale);
  parse_reduction(c.reduction);
  tda::parse_test_statistic(c.statistic);
  require(c.max_degree >= 0, "max_degree must be >= 0");
  require(c.max_dim >= -1, "max_dim must be -1 (auto) or >= 0");
  require(!c.max_value || *c.max_value >= 0, "max_value must be >= 0 or \"auto\"");
  require(c.landscape_degree >= 0 && c.landscape_degree <= c.max_degree,
          "landscape_degree must lie in 0..max_degree");
  require(c.k >= 1, "k must be >= 1");
  require(c.delta > 0 && std::isfinite(c.delta), "delta must be positive");
  require(std::isfinite(c.a), "a must be finite");
  require(c.drop_landscape < c.k, "drop_landscape must be < k");
  require(c.permutations >= 1, "permutations must be >= 1");
  require(c.folds >= 2, "folds must be >= 2");
  require(c.lambda > 0 && std::isfinite(c.lambda), "lambda must be positive");
  require(!c.out_dir.empty(), "out_dir must be set");
  require(c.jobs >= 1, "jobs must be >= 1");
}

std::string config_json(const PipelineConfig& config) { return config_object(config).dump(2) + "\n"; }

tda::PointCloud generate_cloud(const PipelineConfig& config, std::size_t group,
                               std::size_t index) {
  const std::uint64_t s = tda::derive_seed(tda::derive_seed(config.seed, group), index);
  const std::string& shape = group == 0 ? config.shape_a : config.shape_b;
  const std::size_t k = group == 0 ? config.k_a : config.k_b;
  const double radius = group == 0 ? config.radius_a : config.radius_b;
  if (shape == "circle") {
    return tda::sample_circle(config.points, radius, config.noise_sd, s, config.outliers);
  }
  return tda::sample_wedge_of_circles(tda::wedge_counts(k, config.points), radius,
                                      config.noise_sd, s, config.outliers);
}

PipelineResult run_pipeline(const PipelineConfig& config, std::ostream& log) {
  validate(config);
  PipelineResult result;
  result.out_dir = config.out_dir;
  fs::create_directories(result.out_dir);
  OutputSet out(result.out_dir);
  json seeds = json::object();
  json inputs = json::object();

  // Ingest or generate.
  const bool generated = config.input_a.empty();
  std::vector<tda::PointCloud> clouds;
  std::vector<std::string> names;
  std::vector<std::uint64_t> cloud_seeds;
  std::vector<std::size_t> group_of;
  for (std::size_t g = 0; g < 2; ++g) {
    const std::uint64_t group_seed = tda::derive_seed(config.seed, g);
    const auto& paths = g == 0 ? config.input_a : config.input_b;
    const std::size_t count = generated ? (g == 0 ? config.count_a : config.count_b) : paths.size();
    json group_seeds = json::array();
    for (std::size_t i = 0; i < count; ++i) {
      const std::uint64_t s = tda::derive_seed(group_seed, i);
      const std::string name = cloud_name(g, i);
      if (generated) {
        clouds.push_back(generate_cloud(config, g, i));
        out.write("clouds/" + name + ".csv", tda::point_cloud_csv(clouds.back()));
      } else {
        const std::string content = tda::text::read_file(paths[i]);
        inputs[paths[i]] = checksum(content);
        clouds.push_back(tda::load_point_cloud(paths[i], {config.header}));
      }
      names.push_back(name);
      cloud_seeds.push_back(s);
      group_of.push_back(g);
      group_seeds.push_back(s);
    }
    seeds[g == 0 ? "clouds_a" : "clouds_b"] = group_seeds;
  }
  log << "[pipeline] " << clouds.size() << " clouds\n";

  // Persist and summarize.
  const PersistSettings settings = config.persist_settings();
  const tda::LandscapeGrid grid = config.grid();
  std::vector<CloudSummary> summaries(clouds.size());
  std::mutex log_mutex;
  parallel_for(clouds.size(), config.jobs, [&](std::size_t i) {
    const auto dgms = persist_cloud(clouds[i], settings, tda::derive_seed(cloud_seeds[i], 0));
    out.write("diagrams/" + names[i] + ".diagram.csv", tda::diagrams_csv(dgms));
    for (const auto& d : dgms) {
      const std::string stem = "plots/" + names[i] + ".h" + std::to_string(d.degree());
      out.write(stem + ".scatter.csv", tda::diagram_scatter_csv(d));
      out.write(stem + ".svg", diagram_svg(d));
    }
    summaries[i] = summarize_diagrams(dgms, grid, config.landscape_degree);
    out.write("vectors/" + names[i] + ".death.csv", tda::death_vector_csv(summaries[i].death));
    out.write("vectors/" + names[i] + ".landscape.csv",
              tda::landscape_grid_csv(summaries[i].landscape));
    out.write("plots/" + names[i] + ".landscape.polyline.csv",
              tda::landscape_polyline_csv(summaries[i].exact));
    out.write("plots/" + names[i] + ".landscape.svg", landscape_svg(summaries[i].exact));
    std::lock_guard lock(log_mutex);
    log << "[persist] " << names[i] << ": " << clouds[i].size() << " points";
    for (const auto& d : dgms) log << ", H" << d.degree() << " " << d.points().size();
    log << "\n";
  });

  std::vector<tda::FeatureVector> deaths, landscapes;
  for (const auto& s : summaries) {
    deaths.push_back(s.death);
    landscapes.push_back(s.landscape);
  }
  deaths = tda::pad_to_common_length(std::move(deaths));
  auto split = [&](const std::vector<tda::FeatureVector>& all, std::size_t g) {
    std::vector<tda::FeatureVector> part;
    for (std::size_t i = 0; i < all.size(); ++i) {
      if (group_of[i] == g) part.push_back(all[i]);
    }
    return part;
  };

  // Group means and differences.
  for (const auto& [kind, all] : {std::pair{std::string("death"), &deaths},
                                  std::pair{std::string("landscape"), &landscapes}}) {
    const auto mean_a = tda::mean_vectors(split(*all, 0));
    const auto mean_b = tda::mean_vectors(split(*all, 1));
    const auto diff = tda::diff_vectors(mean_a, mean_b);
    for (const auto& [label, v] : {std::pair{"mean_a", &mean_a}, std::pair{"mean_b", &mean_b},
                                   std::pair{"diff", &diff}}) {
      const std::string rel = std::string("summaries/") + label + "." + kind + ".csv";
      if (kind == "death") {
        out.write(rel, tda::death_vector_csv(*v));
      } else {
        out.write(rel, tda::landscape_grid_csv(*v));
        out.write(std::string("plots/") + label + ".landscape.svg", grid_vector_svg(*v));
      }
    }
  }

  // Permutation tests.
  const auto statistic = tda::parse_test_statistic(config.statistic);
  struct Plan {
    const char* name;
    const std::vector<tda::FeatureVector>* vectors;
    std::size_t drop_death, drop_landscape;
  };
  const Plan plans[] = {{"death", &deaths, config.drop_death, 0},
                        {"landscape", &landscapes, 0, config.drop_landscape},
                        {"landscape_full", &landscapes, 0, 0}};
  json test_seeds = json::object();
  json test_results = json::object();
  for (std::size_t t = 0; t < std::size(plans); ++t) {
    const Plan& p = plans[t];
    const auto prepared = prepare_for_test(*p.vectors, p.drop_death, p.drop_landscape);
    tda::PermutationTestOptions opts;
    opts.statistic = statistic;
    opts.n_permutations = config.permutations;
    opts.exhaustive_threshold = config.exhaustive_threshold;
    opts.seed = tda::derive_seed(config.seed, 2 + t);
    TestOutcome outcome{p.name, tda::permutation_test(split(prepared, 0), split(prepared, 1), opts), {}};
    if (p.drop_death) outcome.exclusions.push_back({tda::Exclusion::Mode::drop_death_coords, p.drop_death});
    if (p.drop_landscape) {
      outcome.exclusions.push_back({tda::Exclusion::Mode::drop_landscape_functions, p.drop_landscape});
    }
    out.write(std::string("tests/") + p.name + ".json",
              tda::permutation_result_json(outcome.result, outcome.exclusions));
    log << "[test] " << p.name << ": p = " << tda::text::format_double(outcome.result.p_value)
        << (outcome.result.exhaustive ? " (exhaustive)" : "") << "\n";
    test_seeds[p.name] = opts.seed;
    test_results[p.name] = result_object(outcome);
    result.tests.push_back(std::move(outcome));
  }

  // Classification.
  std::vector<std::vector<double>> features;
  std::vector<int> labels;
  std::string labels_csv = "label,death_file,landscape_file\n";
  for (std::size_t i = 0; i < clouds.size(); ++i) {
    const auto v = config.use_death_vector ? tda::concat_features(deaths[i], landscapes[i])
                                           : landscapes[i];
    features.push_back(v.values);
    labels.push_back(group_of[i] == 0 ? 1 : -1);
    labels_csv += std::string(group_of[i] == 0 ? "1" : "-1") + ",../vectors/" + names[i] +
                  ".death.csv,../vectors/" + names[i] + ".landscape.csv\n";
  }
  const tda::LabeledDataset data(std::move(features), std::move(labels));
  tda::SvmOptions svm{config.lambda, config.epochs, tda::derive_seed(config.seed, 10)};
  seeds["cv"] = svm.seed;
  seeds["tests"] = test_seeds;
  result.cv = tda::cross_validate(data, std::min(config.folds, data.size()), svm);
  for (const auto& w : result.cv.warnings) log << "[classify] warning: " << w << "\n";
  log << "[classify] mean accuracy " << tda::text::format_double(result.cv.mean_accuracy)
      << " over " << result.cv.folds_used << " folds\n";
  out.write("classify/labels.csv", labels_csv);
  out.write("classify/cv_report.json", tda::cv_report_json(result.cv));
  out.write("classify/model.json", tda::model_json(tda::train_svm(data, svm), svm));

  json manifest;
  manifest["tool"] = "tdapipe";
  manifest["version"] = "0.1.0";
  manifest["parameters"] = config_object(config);
  if (!generated) manifest["inputs"] = inputs;
  manifest["seeds"] = seeds;
  json results;
  results["tests"] = test_results;
  results["classification"] = json::parse(tda::cv_report_json(result.cv));
  results["classification"]["features"] = config.use_death_vector ? "death+landscape" : "landscape";
  manifest["results"] = results;
  manifest["outputs"] = out.sums();
  result.outputs = out.sums();
  result.manifest = manifest.dump(2) + "\n";
  tda::text::write_file_atomic(result.out_dir / "manifest.json", result.manifest);
  log << "[pipeline] wrote " << (result.out_dir / "manifest.json").string() << "\n";
  return result;
}

}  // namespace tdapipe
