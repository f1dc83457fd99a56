#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "calaudit/csv_io.hpp"
#include "fixtures.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           (std::string("calaudit_cli_") +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path path(const std::string& name) const { return dir_ / name; }

  void write(const std::string& name, const std::string& text) const {
    std::ofstream(path(name)) << text;
  }

  void write_set(const std::string& name, const calaudit::ScoreSet& set) const {
    std::ofstream out(path(name));
    calaudit::write_scoreset(out, set);
  }

  // Exit status of the CLI with stdout and stderr sent to files in the temp dir.
  int run(const std::string& args) const {
    const std::string cmd = std::string(CALAUDIT_CLI_PATH) + " " + args + " >" +
                            path("stdout.txt").string() + " 2>" + path("stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string read(const std::string& name) const {
    std::ifstream in(path(name));
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  json read_json(const std::string& name) const { return json::parse(read(name)); }

  // Manifest of n_runs calibrated runs with groups light (big) and dark (small).
  void write_manifest(int n_runs, int light, int dark) const {
    const auto runs = fixture::calibrated_runs(n_runs, {{"light", light}, {"dark", dark}}, 300, 5);
    std::ostringstream m;
    m << "run_index,validation_csv_path,test_csv_path\n";
    for (const auto& r : runs) {
      const std::string v = "val_" + std::to_string(r.run_index) + ".csv";
      const std::string t = "test_" + std::to_string(r.run_index) + ".csv";
      write_set(v, r.validation);
      write_set(t, r.test);
      m << r.run_index << ',' << v << ',' << t << '\n';
    }
    write("manifest.csv", m.str());
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, PerfectPredictions) {
  write("perfect.csv", "score,label\n0,0\n0,0\n1,1\n1,1\n");
  ASSERT_EQ(run("metrics --input " + path("perfect.csv").string() + " --output " +
                path("out.json").string()),
            0)
      << read("stderr.txt");
  const json j = read_json("out.json");
  EXPECT_EQ(j["overall"]["metrics"]["auc_roc"], 1.0);
  EXPECT_EQ(j["overall"]["metrics"]["ece"], 0.0);
  EXPECT_EQ(j["overall"]["metrics"]["brier"], 0.0);
  EXPECT_FALSE(j["overall"]["metrics"].contains("delta_ce"));
}

TEST_F(Cli, MetricsToStdoutByGroupWithValidation) {
  write_set("test.csv", fixture::calibrated_groups({{"light", 200}, {"dark", 50}}, 1));
  write_set("val.csv", fixture::calibrated_groups({{"pool", 300}}, 2));
  ASSERT_EQ(run("metrics --by-group --input " + path("test.csv").string() + " --validation " +
                path("val.csv").string() + " --reliability " + path("rel.csv").string()),
            0)
      << read("stderr.txt");
  const json j = json::parse(read("stdout.txt"));
  ASSERT_EQ(j["groups"].size(), 2u);
  EXPECT_EQ(j["groups"]["dark"]["n"], 50);
  EXPECT_TRUE(j["groups"]["light"]["metrics"]["delta_ce"].is_number());
  EXPECT_TRUE(j["platt"]["a"].is_number());
  EXPECT_EQ(read("rel.csv").rfind("bin_index,mean_score,positive_rate,count\n", 0), 0u);
}

TEST_F(Cli, BinCountChangesEceAndIsRecorded) {
  write_set("test.csv", fixture::calibrated_groups({{"a", 400}}, 3));
  ASSERT_EQ(run("metrics --bins 10 --input " + path("test.csv").string() + " --output " +
                path("b10.json").string()),
            0);
  ASSERT_EQ(run("metrics --bins 15 --input " + path("test.csv").string() + " --output " +
                path("b15.json").string()),
            0);
  const json a = read_json("b10.json"), b = read_json("b15.json");
  EXPECT_EQ(a["config"]["n_bins"], 10);
  EXPECT_EQ(b["config"]["n_bins"], 15);
  EXPECT_NE(a["overall"]["metrics"]["ece"], b["overall"]["metrics"]["ece"]);
}

TEST_F(Cli, AuditTwentyFiveRuns) {
  write_manifest(25, 150, 40);
  ASSERT_EQ(run("audit --manifest " + path("manifest.csv").string() + " --output " +
                path("audit").string()),
            0)
      << read("stderr.txt");
  const json j = read_json("audit.json");
  EXPECT_EQ(j["kind"], "group_audit");
  EXPECT_EQ(j["values"]["dark"]["ece"].size(), 25u);
  for (const auto& c : j["comparisons"]) EXPECT_EQ(c["runs_paired"].size(), 25u);
  EXPECT_TRUE(fs::exists(path("audit_ece.csv")));
  EXPECT_TRUE(fs::exists(path("audit_delta_brier.csv")));
}

TEST_F(Cli, SizeMatchedHasThreeArms) {
  write_manifest(5, 150, 40);
  ASSERT_EQ(run("audit --size-matched --metrics ece,brier --manifest " +
                path("manifest.csv").string() + " --output " + path("sm").string()),
            0)
      << read("stderr.txt");
  const json j = read_json("sm.json");
  std::set<std::string> arms;
  for (const auto& c : j["comparisons"]) arms.insert(c["arm"].get<std::string>());
  EXPECT_EQ(arms, (std::set<std::string>{"naive", "matched", "size_effect"}));
  EXPECT_EQ(j["series"], json({"light", "light_matched", "dark"}));
}

TEST_F(Cli, SweepSingleFile) {
  write_set("test.csv", fixture::calibrated_groups({{"a", 500}}, 4));
  ASSERT_EQ(run("sweep --input " + path("test.csv").string() + " --ratios 0.5,1 --metrics ece --output " +
                path("sw").string()),
            0)
      << read("stderr.txt");
  std::istringstream csv(read("sw.csv"));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "metric,group,run,ratio,value");
  int rows = 0;
  while (std::getline(csv, line)) ++rows;
  EXPECT_EQ(rows, 2);
  EXPECT_EQ(read_json("sw.json")["sweep"]["ratios"], json({0.5, 1.0}));
}

TEST_F(Cli, SyntheticSmoke) {
  ASSERT_EQ(run("synthetic --alpha 1,5 --beta 1,5 --runs 3 --n 1000 --output " +
                path("syn").string() + " --population-out " + path("pop").string()),
            0)
      << read("stderr.txt");
  const json j = read_json("syn.json");
  ASSERT_EQ(j["scenarios"].size(), 2u);
  EXPECT_EQ(j["scenarios"][1]["name"], "alpha5_beta5");
  EXPECT_EQ(j["scenarios"][0]["platt"].size(), 3u);
  EXPECT_TRUE(fs::exists(path("syn_alpha1_beta1.csv")));
  EXPECT_TRUE(fs::exists(path("pop_alpha5_beta5.csv")));
}

TEST_F(Cli, Errors) {
  write("bad.csv", "score,label\n0.2,0\n1.5,1\n");
  EXPECT_EQ(run("metrics --input " + path("bad.csv").string()), 1);
  EXPECT_NE(read("stderr.txt").find("line 3"), std::string::npos) << read("stderr.txt");
  EXPECT_EQ(run("metrics --input " + path("bad.csv").string() + " --bogus"), 2);
  EXPECT_EQ(run("synthetic --alpha 0 --runs 1 --n 100 --output " + path("x").string()), 2);
  EXPECT_EQ(run("audit --manifest " + path("bad.csv").string() + " --output " + path("x").string()),
            1);
  EXPECT_EQ(run("metrics --input " + path("bad.csv").string() + " --metrics nope"), 2);
}
