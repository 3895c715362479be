#include "tdapipe/commands.hpp"

#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "tda/text.hpp"
#include "tdapipe/pipeline.hpp"

namespace fs = std::filesystem;

namespace tdapipe {
namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::size_t rows(const std::string& s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("tdapipe_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& rel) const { return (dir_ / rel).string(); }
  void write(const std::string& rel, const std::string& body) const {
    fs::create_directories((dir_ / rel).parent_path());
    tda::text::write_file_atomic(dir_ / rel, body);
  }
  std::string read(const std::string& rel) const { return tda::text::read_file(dir_ / rel); }

  fs::path dir_;
};

TEST_F(CliTest, GenerateCircle) {
  const auto r = cli({"generate", "circle", "--n", "100", "--seed", "7"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(rows(r.out), 100u);
  EXPECT_EQ(cli({"--seed", "7", "generate", "circle", "--n", "100"}).out, r.out);
}

TEST_F(CliTest, GenerateWedgeToFile) {
  const auto r = cli({"generate", "wedge", "--k", "3", "--n-per", "50", "--out", path("w.csv")});
  EXPECT_EQ(r.code, 0) << r.err;
  const std::string body = read("w.csv");
  EXPECT_EQ(rows(body), 150u);
  EXPECT_EQ(std::count(body.begin(), body.begin() + static_cast<std::ptrdiff_t>(body.find('\n')), ','), 2);
}

TEST_F(CliTest, GenerateBatch) {
  const auto r = cli({"generate", "circle", "--n", "20", "--noise", "0.1", "--count", "3", "--out-dir", path("c")});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(path("c/circle_000.csv")));
  EXPECT_TRUE(fs::exists(path("c/circle_002.csv")));
  EXPECT_NE(read("c/circle_000.csv"), read("c/circle_001.csv"));
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(cli({"generate", "circle", "--n", "abc"}).code, 1);
  EXPECT_EQ(cli({"generate", "square"}).code, 1);
  EXPECT_EQ(cli({}).code, 1);
  EXPECT_EQ(cli({"frobnicate"}).code, 1);
  EXPECT_EQ(cli({"--scale", "area", "generate", "circle"}).code, 1);
  EXPECT_EQ(cli({"--jobs", "0", "generate", "circle"}).code, 1);
  const auto help = cli({"--help"});
  EXPECT_EQ(help.code, 0);
  EXPECT_NE(help.out.find("pipeline"), std::string::npos);
}

TEST_F(CliTest, PersistUnitSquare) {
  write("sq.csv", "0,0\n1,0\n1,1\n0,1\n");
  const auto r = cli({"persist", path("sq.csv"), "--out-dir", path("d"), "--plots"});
  EXPECT_EQ(r.code, 0) << r.err;
  const std::string d = read("d/sq.diagram.csv");
  EXPECT_NE(d.find("1,1,1.41421"), std::string::npos) << d;
  EXPECT_EQ(d.substr(0, 18), "0,0,1\n0,0,1\n0,0,1\n");

  EXPECT_EQ(cli({"--scale", "radius", "persist", path("sq.csv"), "--out-dir", path("r")}).code, 0);
  EXPECT_NE(read("r/sq.diagram.csv").find("1,0.5,0.7071"), std::string::npos);

  EXPECT_EQ(cli({"persist", path("sq.csv"), "--out-dir", path("u"), "--reduction", "dual"}).code, 0);
  EXPECT_EQ(read("u/sq.diagram.csv"), d);
}

TEST_F(CliTest, PersistContinuesPastBadFiles) {
  write("good.csv", "0,0\n1,0\n");
  write("empty.csv", "");
  write("bad.csv", "0,0\nx,1\n");
  const auto r = cli({"persist", path("empty.csv"), path("good.csv"), path("bad.csv"), "--out-dir", path("d")});
  EXPECT_EQ(r.code, 2);
  EXPECT_TRUE(fs::exists(path("d/good.diagram.csv")));
  EXPECT_FALSE(fs::exists(path("d/empty.diagram.csv")));
  EXPECT_NE(r.err.find("empty.csv"), std::string::npos);
  EXPECT_NE(r.err.find("line 2"), std::string::npos);
  EXPECT_EQ(cli({"persist", path("missing.csv"), "--out-dir", path("d")}).code, 2);
}

TEST_F(CliTest, PersistBatchOfForty) {
  ASSERT_EQ(cli({"generate", "circle", "--n", "30", "--noise", "0.05", "--count", "40", "--out-dir", path("c")}).code, 0);
  std::vector<std::string> args{"--jobs", "4", "persist", "--out-dir", path("d")};
  for (const auto& e : fs::directory_iterator(dir_ / "c")) args.push_back(e.path().string());
  const auto r = cli(args);
  EXPECT_EQ(r.code, 0) << r.err;
  std::size_t n = 0;
  for (const auto& e : fs::directory_iterator(dir_ / "d")) n += e.path().string().ends_with(".diagram.csv");
  EXPECT_EQ(n, 40u);
}

TEST_F(CliTest, SummarizeDefaultGrid) {
  write("x.diagram.csv", "0,0,0.5\n0,0,inf\n1,1,2\n");
  const auto r = cli({"summarize", path("x.diagram.csv"), "--out-dir", path("s")});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(rows(read("s/x.landscape.csv")), 24060u);
  EXPECT_EQ(read("s/x.death.csv"), "0.5\n");
}

TEST_F(CliTest, SummarizeTinyGrid) {
  write("t.diagram.csv", "0,0,inf\n1,0,2\n");
  const auto r = cli({"summarize", path("t.diagram.csv"), "--out-dir", path("s"), "--k", "1", "--m", "2", "--delta", "1"});
  EXPECT_EQ(r.code, 0) << r.err;
  const auto v = tda::parse_landscape_grid_csv(read("s/t.landscape.csv"));
  EXPECT_EQ(v.values, (std::vector<double>{0, 1, 0}));
}

TEST_F(CliTest, SummarizeGroups) {
  write("a.diagram.csv", "0,0,1\n0,0,inf\n1,0,2\n");
  write("b.diagram.csv", "0,0,3\n0,0,inf\n1,1,3\n");
  const auto r = cli({"summarize", "--out-dir", path("s"), "--k", "1", "--m", "4", "--delta", "0.5",
                      "--group-a", path("a.diagram.csv"), "--group-b", path("b.diagram.csv")});
  EXPECT_EQ(r.code, 0) << r.err;
  for (const char* f : {"mean_a", "mean_b", "diff"}) {
    EXPECT_TRUE(fs::exists(path(std::string("s/") + f + ".death.csv"))) << f;
    EXPECT_TRUE(fs::exists(path(std::string("s/") + f + ".landscape.csv"))) << f;
  }
  EXPECT_EQ(read("s/diff.death.csv"), "-2\n");
  EXPECT_EQ(cli({"summarize", "--out-dir", path("s")}).code, 1);
  EXPECT_EQ(cli({"summarize", path("nope.diagram.csv"), "--out-dir", path("s")}).code, 2);
}

TEST_F(CliTest, TestIdenticalAndSeparated) {
  std::vector<std::string> a, b;
  for (int i = 0; i < 5; ++i) {
    write("a" + std::to_string(i) + ".csv", "1\n0\n");
    write("b" + std::to_string(i) + ".csv", "0\n1\n");
    a.push_back(path("a" + std::to_string(i) + ".csv"));
    b.push_back(path("b" + std::to_string(i) + ".csv"));
  }
  auto args = [](std::vector<std::string> head, const std::vector<std::string>& ga, const std::vector<std::string>& gb) {
    head.push_back("--group-a");
    head.insert(head.end(), ga.begin(), ga.end());
    head.push_back("--group-b");
    head.insert(head.end(), gb.begin(), gb.end());
    head.insert(head.end(), {"--drop-death", "0"});
    return head;
  };
  const auto same = cli(args({"test"}, a, a));
  EXPECT_EQ(same.code, 0) << same.err;
  EXPECT_EQ(nlohmann::json::parse(same.out)["p_value"], 1.0);

  const auto sep = cli(args({"test", "--out", path("r.json")}, a, b));
  EXPECT_EQ(sep.code, 0) << sep.err;
  const auto j = nlohmann::json::parse(read("r.json"));
  EXPECT_LT(j["p_value"].get<double>(), 0.01);
  EXPECT_DOUBLE_EQ(j["p_value"].get<double>(), 2.0 / 252);
  EXPECT_EQ(j["exhaustive"], true);
  EXPECT_NE(sep.err.find("p_value"), std::string::npos);

  // Default exclusion drops 3 of only 2 coordinates.
  auto bad = args({"test"}, a, b);
  bad.resize(bad.size() - 2);
  EXPECT_EQ(cli(bad).code, 1);
}

TEST_F(CliTest, TestTenVersusTenIsExhaustive) {
  std::vector<std::string> args{"test", "--drop-death", "0", "--group-a"};
  for (int i = 0; i < 20; ++i) {
    if (i == 10) args.push_back("--group-b");
    const std::string f = "v" + std::to_string(i) + ".csv";
    write(f, std::to_string(i % 7) + "\n" + std::to_string(i % 3) + "\n");
    args.push_back(path(f));
  }
  const auto r = cli(args);
  EXPECT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["n_permutations"], 184756);
  EXPECT_EQ(j["exhaustive"], true);
}

TEST_F(CliTest, Classify) {
  std::string labels = "label,death_file,landscape_file\n";
  for (int i = 0; i < 12; ++i) {
    const int y = i % 2 ? 1 : -1;
    const std::string d = "d" + std::to_string(i) + ".csv", l = "l" + std::to_string(i) + ".csv";
    write("set/" + d, std::to_string(2 + y * 1.5 + 0.01 * i) + "\n0.5\n");
    write("set/" + l, "1,0," + std::to_string(y * 3 + 0.01 * i) + "\n1,1,0\n");
    labels += std::to_string(y) + "," + d + "," + l + "\n";
  }
  write("set/labels.csv", labels);
  const auto r = cli({"classify", "--labels", path("set/labels.csv"), "--folds", "3", "--report", path("cv.json"),
                      "--model", path("model.json")});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(nlohmann::json::parse(r.out)["mean_accuracy"], 1.0);
  EXPECT_TRUE(fs::exists(path("cv.json")));
  EXPECT_EQ(nlohmann::json::parse(read("model.json"))["weights"].size(), 4u);

  const auto land = cli({"classify", "--labels", path("set/labels.csv"), "--folds", "3", "--no-death-vector",
                         "--model", path("model2.json")});
  EXPECT_EQ(land.code, 0) << land.err;
  EXPECT_NE(land.err.find("landscape features"), std::string::npos);
  EXPECT_EQ(nlohmann::json::parse(read("model2.json"))["weights"].size(), 2u);

  EXPECT_EQ(cli({"classify", "--labels", path("set/labels.csv"), "--folds", "13"}).code, 1);
  EXPECT_EQ(cli({"classify", "--labels", path("set/none.csv")}).code, 2);
}

PipelineConfig small_config(const std::string& out_dir) {
  PipelineConfig c;
  c.count_a = c.count_b = 4;
  c.points = 40;
  c.k = 10;
  c.m = 100;
  c.drop_landscape = 2;
  c.folds = 2;
  c.out_dir = out_dir;
  return c;
}

TEST_F(CliTest, PipelineCreatesDirectoryAndIsDeterministic) {
  const std::string cfg = path("cfg.json");
  write("cfg.json", config_json(small_config(path("nested/run1"))));
  const auto r1 = cli({"pipeline", "--config", cfg});
  EXPECT_EQ(r1.code, 0) << r1.err;
  ASSERT_TRUE(fs::exists(path("nested/run1/manifest.json")));
  const auto manifest = nlohmann::json::parse(read("nested/run1/manifest.json"));
  EXPECT_EQ(manifest["parameters"]["count_a"], 4);
  EXPECT_EQ(manifest["parameters"]["seed"], 20240601);

  // Same config, same directory: byte-identical files and manifest.
  std::map<std::string, std::string> before;
  for (const auto& e : fs::recursive_directory_iterator(dir_ / "nested/run1")) {
    if (e.is_regular_file()) before[e.path().string()] = tda::text::read_file(e.path());
  }
  const auto r2 = cli({"--jobs", "3", "pipeline", "--config", cfg});
  EXPECT_EQ(r2.code, 0) << r2.err;
  EXPECT_EQ(r1.out, r2.out);
  for (const auto& [p, body] : before) EXPECT_EQ(tda::text::read_file(p), body) << p;

  for (const auto& [rel, sum] : manifest["outputs"].items()) {
    EXPECT_EQ(checksum(read("nested/run1/" + rel)), sum.get<std::string>()) << rel;
  }
}

TEST_F(CliTest, PipelineOverridesAndErrors) {
  const auto pc = cli({"--seed", "5", "pipeline", "--set", "k=7", "--set", "drop_landscape=2", "--set", "statistic=sup", "--print-config"});
  EXPECT_EQ(pc.code, 0) << pc.err;
  const auto j = nlohmann::json::parse(pc.out);
  EXPECT_EQ(j["k"], 7);
  EXPECT_EQ(j["seed"], 5);
  EXPECT_EQ(j["statistic"], "sup");
  EXPECT_EQ(cli({"pipeline", "--set", "bogus=1", "--print-config"}).code, 1);
  EXPECT_EQ(cli({"pipeline", "--set", "folds=1", "--print-config"}).code, 1);
  EXPECT_EQ(cli({"pipeline", "--config", path("absent.json")}).code, 2);
  write("broken.json", "{\"k\": ");
  EXPECT_NE(cli({"pipeline", "--config", path("broken.json")}).code, 0);
}

// Values frozen from the first verified run of the bundled demo.
TEST_F(CliTest, DemoGoldenRun) {
  const auto r = cli({"pipeline", "--config", std::string(TDA_SOURCE_DIR) + "/configs/demo.json", "--out-dir",
                      path("demo"), "--jobs", "4"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_DOUBLE_EQ(j["p_values"]["death"].get<double>(), 1.082508822446903e-05);
  EXPECT_DOUBLE_EQ(j["p_values"]["landscape_full"].get<double>(), 1.082508822446903e-05);
  EXPECT_DOUBLE_EQ(j["p_values"]["landscape"].get<double>(), 1.0);
  EXPECT_DOUBLE_EQ(j["cv_mean_accuracy"].get<double>(), 1.0);
}

TEST(CliExecutable, ExitCodes) {
  const std::string exe = TDAPIPE_EXE;
  auto status = [&](const std::string& args) {
    const int raw = std::system((exe + " " + args + " >/dev/null 2>&1").c_str());
    return WEXITSTATUS(raw);
  };
  EXPECT_EQ(status("generate circle --n 5"), 0);
  EXPECT_EQ(status("generate circle --n minus"), 1);
  EXPECT_EQ(status("persist /nonexistent/file.csv --out-dir /tmp/tdapipe_exit_codes"), 2);
  fs::remove_all("/tmp/tdapipe_exit_codes");
}

}  // namespace
}  // namespace tdapipe
