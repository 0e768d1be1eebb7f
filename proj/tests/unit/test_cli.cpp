#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "genraven/cli.hpp"
#include "genraven/io.hpp"
#include "genraven/manifest.hpp"
#include "json.hpp"
#include "test_support.hpp"

namespace genraven {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

nlohmann::json read_json(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           (std::string("genraven_cli_") + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  fs::path dir_;
};

TEST_F(Cli, GenWritesDatasetAndManifest) {
  const Result r = run({"gen", "--seed", "3", "--n-per-rule", "4", "--out", path("train.grvn")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(read_dataset(path("train.grvn")).size(), 35u * 4);
  const DatasetManifest m = read_manifest(path("train.grvn.manifest.json"));
  EXPECT_EQ(m.seed, 3u);
  EXPECT_EQ(m.rules.size(), 35u);
  EXPECT_EQ(m.held_out.size(), 5u);
  EXPECT_EQ(m.split, "train");

  const Result t = run({"gen", "--seed", "3", "--n-per-rule", "2", "--split", "test", "--rules", "all",
                        "--out", path("test.jsonl"), "--manifest", path("m.json")});
  ASSERT_EQ(t.code, 0) << t.err;
  EXPECT_EQ(detect_format(path("test.jsonl")), DatasetFormat::Jsonl);
  EXPECT_EQ(read_dataset(path("test.jsonl")).size(), 80u);
  EXPECT_EQ(read_manifest(path("m.json")).split, "test");
}

TEST_F(Cli, GenRuleSubsetsAndHoldouts) {
  ASSERT_EQ(run({"gen", "--n-per-rule", "2", "--rules", "CONST-SHAPE,XOR-SHAPE", "--holdout", "XOR-SHAPE",
                 "--out", path("a.grvn")})
                .code,
            0);
  const auto a = read_dataset(path("a.grvn"));
  ASSERT_EQ(a.size(), 2u);
  EXPECT_EQ(a[0].label, testing::rule("CONST-SHAPE"));
  ASSERT_EQ(run({"gen", "--n-per-rule", "1", "--holdout", "none", "--out", path("b.grvn")}).code, 0);
  EXPECT_EQ(read_dataset(path("b.grvn")).size(), 40u);
}

TEST_F(Cli, GenIsDeterministicAcrossWorkers) {
  ASSERT_EQ(run({"gen", "--seed", "9", "--n-per-rule", "3", "--workers", "1", "--out", path("a.grvn")}).code, 0);
  ASSERT_EQ(run({"gen", "--seed", "9", "--n-per-rule", "3", "--workers", "4", "--out", path("b.grvn")}).code, 0);
  EXPECT_EQ(slurp(path("a.grvn")), slurp(path("b.grvn")));
  EXPECT_EQ(slurp(path("a.grvn.manifest.json")), slurp(path("b.grvn.manifest.json")));
}

TEST_F(Cli, OraclePipeline) {
  ASSERT_EQ(run({"gen", "--seed", "5", "--n-per-rule", "3", "--split", "test", "--out", path("test.grvn")}).code, 0);
  for (const char* strategy : {"first", "random"}) {
    const std::string out = path(std::string("done_") + strategy + ".grvn");
    const Result c = run({"complete", "--tests", path("test.grvn"), "--strategy", strategy, "--seed", "1", "--out", out});
    ASSERT_EQ(c.code, 0) << c.err;
    const Result e = run({"eval", "completion", "--tests", path("test.grvn"), "--completions", out, "--holdout",
                          "default", "--report", path("completion.json"), "--per-rule-csv", path("completion.csv")});
    ASSERT_EQ(e.code, 0) << e.err;
    const auto j = read_json(path("completion.json"));
    EXPECT_EQ(j["overall_accuracy"], 1.0);
    EXPECT_EQ(j["n_held_out"], 15);
    EXPECT_EQ(j["held_out_accuracy"], 1.0);
  }
  // The completed file keeps labels and panels 1-8.
  const auto tests = read_dataset(path("test.grvn"));
  const auto done = read_dataset(path("done_first.grvn"));
  for (std::size_t i = 0; i < tests.size(); ++i) {
    EXPECT_EQ(tests[i].label, done[i].label);
    for (int p = 0; p < 8; ++p) EXPECT_EQ(tests[i].panel(p), done[i].panel(p));
  }
  // Same invocation, same bytes.
  ASSERT_EQ(run({"complete", "--tests", path("test.grvn"), "--strategy", "random", "--seed", "1", "--out",
                 path("again.grvn")})
                .code,
            0);
  EXPECT_EQ(slurp(path("again.grvn")), slurp(path("done_random.grvn")));
}

TEST_F(Cli, ConsistencyAndMemReports) {
  ASSERT_EQ(run({"gen", "--seed", "1", "--n-per-rule", "2", "--out", path("train.grvn")}).code, 0);
  ASSERT_EQ(run({"gen", "--seed", "1", "--n-per-rule", "2", "--split", "control", "--holdout", "none", "--out",
                 path("control.grvn")})
                .code,
            0);
  const Result c = run({"eval", "consistency", "--samples", path("train.grvn"), "--report", path("c.json"),
                        "--per-rule-csv", path("c.csv")});
  ASSERT_EQ(c.code, 0) << c.err;
  EXPECT_EQ(read_json(path("c.json"))["c3_fraction"], 1.0);
  EXPECT_EQ(read_json(path("c.json"))["valid_row_fraction"], 1.0);
  const std::string csv = slurp(path("c.csv"));
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 41);

  const Result m = run({"mem", "--generated", path("train.grvn"), "--train", path("train.grvn"), "--control",
                        path("control.grvn"), "--report", path("m.json"), "--csv", path("m.csv")});
  ASSERT_EQ(m.code, 0) << m.err;
  const auto j = read_json(path("m.json"));
  EXPECT_EQ(j["train"]["levels"]["sample"]["fraction"], 1.0);
  EXPECT_EQ(j["control"]["levels"]["sample"]["fraction"], 0.0);
  EXPECT_TRUE(fs::exists(path("m.csv")));
}

TEST_F(Cli, InspectNamesTheLabelInEveryRow) {
  ASSERT_EQ(run({"gen", "--seed", "2", "--n-per-rule", "1", "--split", "test", "--out", path("t.grvn")}).code, 0);
  const auto samples = read_dataset(path("t.grvn"));
  for (std::size_t i = 0; i < samples.size(); i += 7) {
    const Result r = run({"inspect", "--file", path("t.grvn"), "--index", std::to_string(i)});
    ASSERT_EQ(r.code, 0) << r.err;
    const std::string label = samples[i].label->name();
    EXPECT_NE(r.out.find("label: " + label), std::string::npos);
    std::istringstream lines(r.out);
    std::string line;
    int rows = 0;
    while (std::getline(lines, line)) {
      if (line.rfind("  rules: ", 0) != 0) continue;
      ++rows;
      const std::string list = "," + line.substr(9) + ",";
      EXPECT_NE(list.find("," + label + ","), std::string::npos) << line;
    }
    EXPECT_EQ(rows, 3);
    EXPECT_NE(r.out.find("C3: yes"), std::string::npos);
  }
  EXPECT_EQ(run({"inspect", "--file", path("t.grvn"), "--index", "40"}).code, cli::kUsage);
}

TEST_F(Cli, ExportRoundTrip) {
  ASSERT_EQ(run({"gen", "--seed", "4", "--n-per-rule", "1", "--out", path("a.grvn")}).code, 0);
  ASSERT_EQ(run({"export", "--file", path("a.grvn"), "--to", "jsonl", "--out", path("a.jsonl")}).code, 0);
  ASSERT_EQ(run({"export", "--file", path("a.jsonl"), "--to", "binary", "--out", path("b.grvn")}).code, 0);
  EXPECT_EQ(slurp(path("a.grvn")), slurp(path("b.grvn")));
  const Result inspect = run({"inspect", "--file", path("a.jsonl"), "--index", "0"});
  EXPECT_EQ(inspect.code, 0);
}

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(run({}).code, cli::kUsage);
  EXPECT_EQ(run({"frobnicate"}).code, cli::kUsage);
  EXPECT_EQ(run({"gen", "--out", path("x.grvn")}).code, cli::kUsage);  // --n-per-rule missing
  EXPECT_EQ(run({"gen", "--n-per-rule", "1", "--rules", "NOPE", "--out", path("x.grvn")}).code, cli::kUsage);
  EXPECT_EQ(run({"gen", "--n-per-rule", "1", "--split", "dev", "--out", path("x.grvn")}).code, cli::kUsage);
  EXPECT_EQ(run({"complete", "--tests", path("x.grvn"), "--strategy", "best", "--out", path("y.grvn")}).code,
            cli::kUsage);
  const Result help = run({"--help"});
  EXPECT_EQ(help.code, cli::kOk);
  EXPECT_NE(help.out.find("gen"), std::string::npos);

  const Result missing = run({"eval", "consistency", "--samples", path("nope.grvn"), "--report", path("r.json")});
  EXPECT_EQ(missing.code, cli::kDataError);
  EXPECT_NE(missing.err.find("nope.grvn"), std::string::npos);

  ASSERT_EQ(run({"gen", "--n-per-rule", "1", "--out", path("g.grvn")}).code, 0);
  std::string bytes = slurp(path("g.grvn"));
  bytes[16 + 244 * 3] = 77;  // bad rule index in record 3
  std::ofstream(path("bad.grvn"), std::ios::binary) << bytes;
  const Result bad = run({"eval", "consistency", "--samples", path("bad.grvn"), "--report", path("r.json")});
  EXPECT_EQ(bad.code, cli::kDataError);
  EXPECT_NE(bad.err.find("bad.grvn"), std::string::npos);
  EXPECT_NE(bad.err.find("offset " + std::to_string(16 + 244 * 3)), std::string::npos);

  // Completions file shorter than the tests.
  ASSERT_EQ(run({"gen", "--n-per-rule", "1", "--rules", "CONST-SHAPE", "--out", path("one.grvn")}).code, 0);
  EXPECT_EQ(run({"eval", "completion", "--tests", path("g.grvn"), "--completions", path("one.grvn"), "--report",
                 path("r.json")})
                .code,
            cli::kDataError);
}

TEST_F(Cli, UnsolvableTestsExitWithSolverFailure) {
  CounterRng rng(StreamKey{1, StreamLabel::Baseline, 0, 0});
  Sample s;
  s.rows[0] = generate_row(testing::rule("CONST-SIZE"), rng);
  s.rows[1] = generate_row(testing::rule("XOR-POSITION"), rng);
  s.rows[2] = generate_row(testing::rule("CONST-SIZE"), rng);
  const std::vector<Sample> v = {s};
  write_dataset(v, path("mixed.grvn"), DatasetFormat::Binary);
  const Result r = run({"complete", "--tests", path("mixed.grvn"), "--out", path("out.grvn")});
  EXPECT_EQ(r.code, cli::kGenerationFailure);
  EXPECT_NE(r.err.find("mixed.grvn: test 0"), std::string::npos) << r.err;
}

}  // namespace
}  // namespace genraven
