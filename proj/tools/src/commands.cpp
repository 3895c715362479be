#include "tdapipe/commands.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <mutex>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "tda/error.hpp"
#include "tda/random.hpp"
#include "tda/text.hpp"
#include "tdapipe/pipeline.hpp"
#include "tdapipe/stages.hpp"

namespace tdapipe {

namespace fs = std::filesystem;

namespace {

struct Globals {
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  std::string scale = "diameter";
};

// Base name without ".csv" and the stage suffix (".diagram").
std::string stem_of(const fs::path& p) {
  std::string s = p.filename().string();
  for (const char* suffix : {".csv", ".diagram"}) {
    const std::string_view sv(suffix);
    if (s.size() > sv.size() && s.ends_with(sv)) s.resize(s.size() - sv.size());
  }
  return s;
}

std::optional<double> parse_max_value(const std::string& text) {
  if (text == "auto") return std::nullopt;
  const auto v = tda::text::parse_double(text);
  if (!v || *v < 0) throw tda::ArgumentError("--max-value must be 'auto' or a number >= 0");
  return *v;
}

std::vector<tda::PersistenceDiagram> load_diagrams(const fs::path& path, std::size_t min_degrees) {
  std::ifstream in(path);
  if (!in) throw tda::IoError("cannot open " + path.string());
  return tda::parse_diagrams_csv(in, min_degrees);
}

// ---- generate ----------------------------------------------------------

struct GenerateArgs {
  std::string shape;
  std::size_t n = 100, k = 2, n_per = 50, outliers = 0, count = 1;
  double radius = 1.0, noise = 0.0;
  std::string out, out_dir;
};

void add_generate(CLI::App& app, GenerateArgs& a) {
  auto* sub = app.add_subcommand("generate", "Write synthetic point clouds as CSV");
  sub->add_option("shape", a.shape, "circle or wedge")->required()->check(CLI::IsMember({"circle", "wedge"}));
  sub->add_option("--n", a.n, "Points on the circle")->capture_default_str();
  sub->add_option("--k", a.k, "Circles in the wedge")->capture_default_str();
  sub->add_option("--n-per", a.n_per, "Points per wedge circle")->capture_default_str();
  sub->add_option("--radius", a.radius, "Circle radius")->capture_default_str();
  sub->add_option("--noise", a.noise, "Gaussian noise standard deviation")->capture_default_str();
  sub->add_option("--outliers", a.outliers, "Uniform outliers appended")->capture_default_str();
  sub->add_option("--out", a.out, "Output file (default: stdout)");
  sub->add_option("--count", a.count, "Clouds to write into --out-dir, seeded per index")
      ->capture_default_str();
  sub->add_option("--out-dir", a.out_dir, "Directory for <shape>_<i>.csv files");
}

int run_generate(const GenerateArgs& a, const Globals& g, std::ostream& out, std::ostream& err) {
  if (a.count < 1) throw tda::ArgumentError("--count must be >= 1");
  if (a.count > 1 && a.out_dir.empty()) throw tda::ArgumentError("--count > 1 needs --out-dir");
  if (!a.out.empty() && !a.out_dir.empty()) throw tda::ArgumentError("use either --out or --out-dir");
  auto make = [&](std::uint64_t seed) {
    return a.shape == "circle" ? tda::sample_circle(a.n, a.radius, a.noise, seed, a.outliers)
                               : tda::sample_wedge_of_circles(a.k, a.n_per, a.radius, a.noise,
                                                              seed, a.outliers);
  };
  if (a.out_dir.empty()) {
    const std::string csv = tda::point_cloud_csv(make(g.seed));
    if (a.out.empty()) {
      out << csv;
    } else {
      tda::text::write_file_atomic(a.out, csv);
      err << "wrote " << a.out << "\n";
    }
    return kOk;
  }
  for (std::size_t i = 0; i < a.count; ++i) {
    char name[64];
    std::snprintf(name, sizeof name, "%s_%03zu.csv", a.shape.c_str(), i);
    const fs::path path = fs::path(a.out_dir) / name;
    tda::text::write_file_atomic(path, tda::point_cloud_csv(make(tda::derive_seed(g.seed, i))));
    err << "wrote " << path.string() << "\n";
  }
  return kOk;
}

// ---- persist -----------------------------------------------------------

struct PersistArgs {
  std::vector<std::string> files;
  std::string out_dir;
  int max_degree = 1, max_dim = -1;
  std::string max_value = "auto", strategy = "maxmin", reduction = "standard";
  bool header = false, plots = false;
  std::size_t subsample = 0;
};

void add_persist(CLI::App& app, PersistArgs& a) {
  auto* sub = app.add_subcommand("persist", "Vietoris-Rips persistence diagrams of CSV clouds");
  sub->add_option("files", a.files, "Point-cloud CSV files")->required();
  sub->add_option("--out-dir", a.out_dir, "Directory for <stem>.diagram.csv files")->required();
  sub->add_option("--max-degree", a.max_degree, "Highest homology degree")->capture_default_str();
  sub->add_option("--max-dim", a.max_dim, "Highest simplex dimension (-1: max degree + 1)")
      ->capture_default_str();
  sub->add_option("--max-value", a.max_value, "Filtration cap, or 'auto' (enclosing radius)")
      ->capture_default_str();
  sub->add_flag("--header", a.header, "Skip the first line of every input");
  sub->add_option("--subsample", a.subsample, "Keep this many points (0: all)")->capture_default_str();
  sub->add_option("--strategy", a.strategy, "Subsampling: random or maxmin")
      ->check(CLI::IsMember({"random", "maxmin"}))
      ->capture_default_str();
  sub->add_option("--reduction", a.reduction, "standard or dual (same diagrams)")
      ->check(CLI::IsMember({"standard", "dual"}))
      ->capture_default_str();
  sub->add_flag("--plots", a.plots, "Also write scatter CSV and SVG per degree");
}

int run_persist(const PersistArgs& a, const Globals& g, std::ostream& err) {
  PersistSettings settings;
  settings.max_degree = a.max_degree;
  settings.max_dim = a.max_dim;
  settings.max_value = parse_max_value(a.max_value);
  settings.scale = parse_scale(g.scale);
  settings.subsample = a.subsample;
  settings.strategy = parse_strategy(a.strategy);
  settings.dual = parse_reduction(a.reduction);
  if (a.max_degree < 0) throw tda::ArgumentError("--max-degree must be >= 0");
  if (a.max_dim < -1) throw tda::ArgumentError("--max-dim must be >= -1");

  std::mutex mutex;
  std::size_t failed = 0, done = 0;
  parallel_for(a.files.size(), g.jobs, [&](std::size_t i) {
    const fs::path in = a.files[i];
    std::string message;
    bool ok = true;
    try {
      const auto cloud = tda::load_point_cloud(in, {a.header});
      const auto dgms = persist_cloud(cloud, settings, tda::derive_seed(g.seed, i));
      const fs::path dir(a.out_dir);
      const std::string stem = stem_of(in);
      tda::text::write_file_atomic(dir / (stem + ".diagram.csv"), tda::diagrams_csv(dgms));
      if (a.plots) {
        for (const auto& d : dgms) {
          const std::string base = stem + ".h" + std::to_string(d.degree());
          tda::text::write_file_atomic(dir / (base + ".scatter.csv"), tda::diagram_scatter_csv(d));
          tda::text::write_file_atomic(dir / (base + ".svg"), diagram_svg(d));
        }
      }
      message = std::to_string(cloud.size()) + " points";
      for (const auto& d : dgms) {
        message += ", H" + std::to_string(d.degree()) + " " + std::to_string(d.points().size()) +
                   "+" + std::to_string(d.essentials().size());
      }
    } catch (const tda::ArgumentError& e) {
      ok = false;
      message = e.what();
    } catch (const tda::Error& e) {
      ok = false;
      message = e.what();
    }
    std::lock_guard lock(mutex);
    ++done;
    err << "[" << done << "/" << a.files.size() << "] " << in.string() << ": "
        << (ok ? "" : "error: ") << message << "\n";
    failed += !ok;
  });
  if (failed) {
    err << failed << " of " << a.files.size() << " files failed\n";
    return kDataError;
  }
  return kOk;
}

// ---- summarize ---------------------------------------------------------

struct SummarizeArgs {
  std::vector<std::string> files, group_a, group_b;
  std::string out_dir;
  std::size_t k = 60, m = 400;
  double a = 0.0, delta = 0.1;
  int landscape_degree = 1;
  bool plots = false;
};

void add_summarize(CLI::App& app, SummarizeArgs& a) {
  auto* sub = app.add_subcommand("summarize", "Death vectors and vectorized landscapes");
  sub->add_option("files", a.files, "Diagram CSV files");
  sub->add_option("--out-dir", a.out_dir, "Output directory")->required();
  sub->add_option("--k", a.k, "Landscape functions K")->capture_default_str();
  sub->add_option("--a", a.a, "Grid start")->capture_default_str();
  sub->add_option("--delta", a.delta, "Grid step")->capture_default_str();
  sub->add_option("--m", a.m, "Grid steps (m + 1 points)")->capture_default_str();
  sub->add_option("--landscape-degree", a.landscape_degree, "Diagram degree for landscapes")
      ->capture_default_str();
  sub->add_option("--group-a", a.group_a, "Diagrams of group A (writes means and difference)");
  sub->add_option("--group-b", a.group_b, "Diagrams of group B");
  sub->add_flag("--plots", a.plots, "Also write landscape polylines and SVG");
}

int run_summarize(const SummarizeArgs& a, std::ostream& err) {
  if (a.group_a.empty() != a.group_b.empty()) {
    throw tda::ArgumentError("--group-a and --group-b go together");
  }
  if (a.landscape_degree < 0) throw tda::ArgumentError("--landscape-degree must be >= 0");
  const tda::LandscapeGrid grid{a.k, a.a, a.delta, a.m};
  if (grid.functions == 0 || !(grid.step > 0)) throw tda::ArgumentError("need --k >= 1 and --delta > 0");

  std::vector<std::string> all;
  std::set<std::string> seen;
  for (const auto* list : {&a.files, &a.group_a, &a.group_b}) {
    for (const auto& f : *list) {
      if (seen.insert(f).second) all.push_back(f);
    }
  }
  if (all.empty()) throw tda::ArgumentError("no diagram files given");

  const fs::path dir(a.out_dir);
  std::map<std::string, CloudSummary> by_path;
  for (const auto& f : all) {
    const auto dgms = load_diagrams(f, static_cast<std::size_t>(a.landscape_degree) + 1);
    CloudSummary s = summarize_diagrams(dgms, grid, a.landscape_degree);
    const std::string stem = stem_of(f);
    tda::text::write_file_atomic(dir / (stem + ".death.csv"), tda::death_vector_csv(s.death));
    tda::text::write_file_atomic(dir / (stem + ".landscape.csv"), tda::landscape_grid_csv(s.landscape));
    if (a.plots) {
      tda::text::write_file_atomic(dir / (stem + ".landscape.polyline.csv"),
                                   tda::landscape_polyline_csv(s.exact));
      tda::text::write_file_atomic(dir / (stem + ".landscape.svg"), landscape_svg(s.exact));
    }
    err << f << ": " << s.death.size() << " deaths, " << s.landscape.size() << " landscape values\n";
    by_path.emplace(f, std::move(s));
  }

  if (!a.group_a.empty()) {
    auto collect = [&](const std::vector<std::string>& files, bool death) {
      std::vector<tda::FeatureVector> v;
      for (const auto& f : files) v.push_back(death ? by_path.at(f).death : by_path.at(f).landscape);
      return v;
    };
    for (bool death : {true, false}) {
      auto va = collect(a.group_a, death), vb = collect(a.group_b, death);
      if (death) {
        std::vector<tda::FeatureVector> both = va;
        both.insert(both.end(), vb.begin(), vb.end());
        both = tda::pad_to_common_length(std::move(both));
        va.assign(both.begin(), both.begin() + static_cast<std::ptrdiff_t>(va.size()));
        vb.assign(both.begin() + static_cast<std::ptrdiff_t>(va.size()), both.end());
      }
      const auto mean_a = tda::mean_vectors(va), mean_b = tda::mean_vectors(vb);
      const auto diff = tda::diff_vectors(mean_a, mean_b);
      const std::string kind = death ? "death" : "landscape";
      for (const auto& [label, v] : {std::pair{"mean_a", &mean_a}, std::pair{"mean_b", &mean_b},
                                     std::pair{"diff", &diff}}) {
        const fs::path path = dir / (std::string(label) + "." + kind + ".csv");
        tda::text::write_file_atomic(path, death ? tda::death_vector_csv(*v) : tda::landscape_grid_csv(*v));
        if (!death && a.plots) {
          tda::text::write_file_atomic(dir / (std::string(label) + ".landscape.svg"), grid_vector_svg(*v));
        }
      }
    }
    err << "wrote group means and differences to " << dir.string() << "\n";
  }
  return kOk;
}

// ---- test --------------------------------------------------------------

struct TestArgs {
  std::vector<std::string> group_a, group_b;
  std::string statistic = "l2", out;
  std::size_t permutations = 9999, drop_death = 3, drop_landscape = 20;
  std::uint64_t exhaustive_threshold = 200000;
};

void add_test(CLI::App& app, TestArgs& a) {
  auto* sub = app.add_subcommand("test", "Permutation test for a difference in group means");
  sub->add_option("--group-a", a.group_a, "Vector files of group A")->required();
  sub->add_option("--group-b", a.group_b, "Vector files of group B")->required();
  sub->add_option("--statistic", a.statistic, "l2 or sup")
      ->check(CLI::IsMember({"l2", "sup", "l2_mean_diff", "sup_mean_diff"}))
      ->capture_default_str();
  sub->add_option("--permutations", a.permutations, "Monte Carlo draws")->capture_default_str();
  sub->add_option("--exhaustive-threshold", a.exhaustive_threshold,
                  "Enumerate all splits up to this many")
      ->capture_default_str();
  sub->add_option("--drop-death", a.drop_death, "Leading death coordinates removed")
      ->capture_default_str();
  sub->add_option("--drop-landscape", a.drop_landscape, "Leading landscape functions removed")
      ->capture_default_str();
  sub->add_option("--out", a.out, "Result JSON file");
}

int run_test(const TestArgs& a, const Globals& g, std::ostream& out, std::ostream& err) {
  std::vector<tda::FeatureVector> all;
  for (const auto* list : {&a.group_a, &a.group_b}) {
    for (const auto& f : *list) all.push_back(load_feature_vector(f));
  }
  all = prepare_for_test(std::move(all), a.drop_death, a.drop_landscape);
  const auto split = static_cast<std::ptrdiff_t>(a.group_a.size());
  const std::vector<tda::FeatureVector> va(all.begin(), all.begin() + split), vb(all.begin() + split, all.end());

  tda::PermutationTestOptions opts;
  opts.statistic = tda::parse_test_statistic(a.statistic);
  opts.n_permutations = a.permutations;
  opts.exhaustive_threshold = a.exhaustive_threshold;
  opts.seed = g.seed;
  const auto r = tda::permutation_test(va, vb, opts);
  std::vector<tda::Exclusion> exclusions;
  const bool death = all.front().kind == tda::FeatureKind::death;
  if (death && a.drop_death) exclusions.push_back({tda::Exclusion::Mode::drop_death_coords, a.drop_death});
  if (!death && a.drop_landscape) {
    exclusions.push_back({tda::Exclusion::Mode::drop_landscape_functions, a.drop_landscape});
  }
  const std::string json = tda::permutation_result_json(r, exclusions);
  if (!a.out.empty()) tda::text::write_file_atomic(a.out, json);
  out << json;
  err << "p_value = " << tda::text::format_double(r.p_value) << " ("
      << (r.exhaustive ? "exhaustive, " : "Monte Carlo, ") << r.n_permutations << " splits)\n";
  return kOk;
}

// ---- classify ----------------------------------------------------------

struct ClassifyArgs {
  std::string labels, report, model;
  bool no_death = false;
  std::size_t folds = 10, epochs = 0, drop_death = 0, drop_landscape = 0;
  double lambda = 1e-3;
};

void add_classify(CLI::App& app, ClassifyArgs& a) {
  auto* sub = app.add_subcommand("classify", "Cross-validated linear SVM on summary vectors");
  sub->add_option("--labels", a.labels, "CSV of label,death_file,landscape_file")->required();
  sub->add_flag("--no-death-vector", a.no_death, "Use landscape features only");
  sub->add_option("--folds", a.folds, "Cross-validation folds")->capture_default_str();
  sub->add_option("--lambda", a.lambda, "Regularization strength")->capture_default_str();
  sub->add_option("--epochs", a.epochs, "SGD steps (0: 100 x samples)")->capture_default_str();
  sub->add_option("--drop-death", a.drop_death, "Leading death coordinates removed")
      ->capture_default_str();
  sub->add_option("--drop-landscape", a.drop_landscape, "Leading landscape functions removed")
      ->capture_default_str();
  sub->add_option("--report", a.report, "CV report JSON file");
  sub->add_option("--model", a.model, "Write a model trained on all samples");
}

int run_classify(const ClassifyArgs& a, const Globals& g, std::ostream& out, std::ostream& err) {
  const fs::path labels_path(a.labels);
  const fs::path base = labels_path.parent_path();
  const std::string content = tda::text::read_file(labels_path);
  std::vector<int> labels;
  std::vector<tda::FeatureVector> deaths, landscapes;
  std::size_t line_no = 0;
  for (auto line : tda::text::split(content, '\n')) {
    ++line_no;
    line = tda::text::trim(line);
    if (line.empty()) continue;
    const auto fields = tda::text::split(line, ',');
    const auto label = fields.empty() ? std::nullopt : tda::text::parse_double(fields[0]);
    if (!label && labels.empty() && line_no == 1) continue;  // header
    if (fields.size() != 3) throw tda::ParseError("expected label,death_file,landscape_file", line_no);
    if (!label || (*label != 1.0 && *label != -1.0)) throw tda::ParseError("label must be 1 or -1", line_no);
    labels.push_back(static_cast<int>(*label));
    auto resolve = [&](std::string_view f) { return base / std::string(tda::text::trim(f)); };
    if (!a.no_death) deaths.push_back(load_feature_vector(resolve(fields[1])));
    landscapes.push_back(load_feature_vector(resolve(fields[2])));
  }
  if (labels.empty()) throw tda::EmptyInputError(a.labels + ": no samples");
  if (!a.no_death) {
    deaths = prepare_for_test(std::move(deaths), a.drop_death, 0);
    for (const auto& d : deaths) {
      if (d.kind != tda::FeatureKind::death) throw tda::InvalidInputError("death column holds a landscape file");
    }
  }
  landscapes = prepare_for_test(std::move(landscapes), 0, a.drop_landscape);
  std::vector<std::vector<double>> features;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    features.push_back(
        (a.no_death ? landscapes[i] : tda::concat_features(deaths[i], landscapes[i])).values);
  }
  const tda::LabeledDataset data(std::move(features), labels);
  const tda::SvmOptions svm{a.lambda, a.epochs, g.seed};
  const auto report = tda::cross_validate(data, a.folds, svm);
  for (const auto& w : report.warnings) err << "warning: " << w << "\n";
  const std::string json = tda::cv_report_json(report);
  if (!a.report.empty()) tda::text::write_file_atomic(a.report, json);
  if (!a.model.empty()) tda::text::write_file_atomic(a.model, tda::model_json(tda::train_svm(data, svm), svm));
  out << json;
  err << "mean accuracy " << tda::text::format_double(report.mean_accuracy) << " ("
      << (a.no_death ? "landscape" : "death+landscape") << " features)\n";
  return kOk;
}

// ---- pipeline ----------------------------------------------------------

struct PipelineArgs {
  std::string config, out_dir;
  std::vector<std::string> overrides;
  bool print_config = false;
};

void add_pipeline(CLI::App& app, PipelineArgs& a) {
  auto* sub = app.add_subcommand("pipeline", "Run every stage end to end from a JSON config");
  sub->add_option("--config", a.config, "Flat JSON config (defaults when absent)");
  sub->add_option("--out-dir", a.out_dir, "Run directory (overrides out_dir)");
  sub->add_option("--set", a.overrides, "Override a config key: key=value");
  sub->add_flag("--print-config", a.print_config, "Print the resolved config and exit");
}

int run_pipeline_cmd(const PipelineArgs& a, const Globals& g, const CLI::App& app,
                     std::ostream& out, std::ostream& err) {
  PipelineConfig config = a.config.empty() ? PipelineConfig{} : load_pipeline_config(a.config);
  for (const auto& o : a.overrides) apply_override(config, o);
  if (app.count("--seed")) config.seed = g.seed;
  if (app.count("--jobs")) config.jobs = g.jobs;
  if (app.count("--scale")) config.scale = g.scale;
  if (!a.out_dir.empty()) config.out_dir = a.out_dir;
  validate(config);
  if (a.print_config) {
    out << config_json(config);
    return kOk;
  }
  const PipelineResult r = run_pipeline(config, err);
  nlohmann::ordered_json summary;
  summary["manifest"] = (r.out_dir / "manifest.json").string();
  for (const auto& t : r.tests) summary["p_values"][t.name] = t.result.p_value;
  summary["cv_mean_accuracy"] = r.cv.mean_accuracy;
  out << summary.dump(2) << "\n";
  return kOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"tdapipe: persistent homology summaries, permutation tests and SVM classification"};
  app.name("tdapipe");
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Seed for every random step")->capture_default_str();
  app.add_option("--jobs", g.jobs, "Worker threads for batch stages")->capture_default_str();
  app.add_option("--scale", g.scale, "Filtration scale of written diagrams")
      ->check(CLI::IsMember({"diameter", "radius"}))
      ->capture_default_str();

  GenerateArgs gen;
  PersistArgs per;
  SummarizeArgs sum;
  TestArgs tst;
  ClassifyArgs cls;
  PipelineArgs pip;
  add_generate(app, gen);
  add_persist(app, per);
  add_summarize(app, sum);
  add_test(app, tst);
  add_classify(app, cls);
  add_pipeline(app, pip);

  std::vector<const char*> argv{"tdapipe"};
  for (const auto& s : args) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (g.jobs < 1) throw tda::ArgumentError("--jobs must be >= 1");
    if (app.got_subcommand("generate")) return run_generate(gen, g, out, err);
    if (app.got_subcommand("persist")) return run_persist(per, g, err);
    if (app.got_subcommand("summarize")) return run_summarize(sum, err);
    if (app.got_subcommand("test")) return run_test(tst, g, out, err);
    if (app.got_subcommand("classify")) return run_classify(cls, g, out, err);
    if (app.got_subcommand("pipeline")) return run_pipeline_cmd(pip, g, app, out, err);
  } catch (const tda::ArgumentError& e) {
    err << "error: " << e.what() << "\nRun with --help for usage.\n";
    return kUsage;
  } catch (const tda::Error& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kInternal;
}

}  // namespace tdapipe
