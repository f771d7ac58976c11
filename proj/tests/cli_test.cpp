#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "tsbench/cli.hpp"
#include "tsbench/config.hpp"
#include "tsbench/results_io.hpp"

namespace tsbench {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() /
          ("tsbench_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    unsetenv(kOutDirEnv);
  }
  void TearDown() override {
    unsetenv(kOutDirEnv);
    fs::remove_all(dir);
  }
  fs::path write_config(const std::string& body) {
    const auto p = dir / "cfg.yaml";
    std::ofstream(p) << body;
    return p;
  }
  fs::path dir;
};

const char* kOneCell =
    "d: 1\nM: 1\nsigma: 0.1\ndepth: 1\nscheme: tune\nepsilon: 10\n"
    "n_list: [16]\ntrials: 2\nn_mc: 512\nmax_epochs: 20\n";

TEST_F(CliTest, UsageErrorsExitTwo) {
  EXPECT_EQ(cli_main(std::vector<std::string>{}), 2);
  EXPECT_EQ(cli_main({"frobnicate"}), 2);
  EXPECT_EQ(cli_main({"sweep"}), 2);  // --config is required
  EXPECT_EQ(cli_main({"trial", "--depth", "7"}), 2);
  EXPECT_EQ(cli_main({"--help"}), 0);
}

TEST_F(CliTest, UnreadableConfigExitsOne) {
  EXPECT_EQ(cli_main({"sweep", "--config", (dir / "missing.yaml").string()}), 1);
}

TEST_F(CliTest, InvalidConfigExitsOne) {
  EXPECT_EQ(cli_main({"sweep", "--config", write_config("d: 1\nbogus_key: 3\n").string()}), 1);
  EXPECT_EQ(cli_main({"sweep", "--config", write_config("depth: 5\n").string()}), 1);
}

TEST_F(CliTest, SelftestPasses) { EXPECT_EQ(cli_main({"selftest"}), 0); }

TEST_F(CliTest, SweepThenReport) {
  const auto out = dir / "run";
  ASSERT_EQ(cli_main({"--out", out.string(), "sweep", "--config", write_config(kOneCell).string()}), 0);
  ASSERT_TRUE(fs::exists(out / "results.csv"));
  ASSERT_TRUE(fs::exists(out / "summary.json"));
  EXPECT_EQ(read_results_csv(out / "results.csv").size(), 2u);
  EXPECT_NE(slurp(out / "summary.json").find("\"n_eps\""), std::string::npos);

  const auto fig = dir / "fig";
  ASSERT_EQ(cli_main({"--out", fig.string(), "report", "--in", (out / "results.csv").string(), "--fig",
                      "samples", "--eps", "10"}),
            0);
  const std::string svg = slurp(fig / "samples_sigma0.1.svg");
  EXPECT_NE(svg.find("<circle"), std::string::npos);
  EXPECT_NE(svg.find("<line"), std::string::npos);
}

TEST_F(CliTest, OutDirPrecedence) {
  // flag > config > environment > default
  const auto cfg = write_config(std::string(kOneCell) + "out: " + (dir / "from_config").string() + "\n");
  setenv(kOutDirEnv, (dir / "from_env").c_str(), 1);
  ASSERT_EQ(cli_main({"sweep", "--config", cfg.string()}), 0);
  EXPECT_TRUE(fs::exists(dir / "from_config" / "results.csv"));
  EXPECT_FALSE(fs::exists(dir / "from_env"));

  ASSERT_EQ(cli_main({"--out", (dir / "from_flag").string(), "sweep", "--config", cfg.string()}), 0);
  EXPECT_TRUE(fs::exists(dir / "from_flag" / "results.csv"));

  ASSERT_EQ(cli_main({"sweep", "--config", write_config(kOneCell).string()}), 0);
  EXPECT_TRUE(fs::exists(dir / "from_env" / "results.csv"));
}

TEST_F(CliTest, TrialAndLambdaAndLrfind) {
  EXPECT_EQ(cli_main({"--out", (dir / "t").string(), "trial", "--d", "2", "--M", "2", "--N", "32",
                      "--scheme", "same", "--n-mc", "256", "--snapshot", (dir / "net.json").string()}),
            0);
  EXPECT_TRUE(fs::exists(dir / "net.json"));
  EXPECT_EQ(cli_main({"--out", (dir / "lam").string(), "lambda", "--M", "1,2,3", "--count", "10"}), 0);
  EXPECT_TRUE(fs::exists(dir / "lam" / "lambda_summary.csv"));
  EXPECT_EQ(cli_main({"--out", (dir / "lr").string(), "lrfind", "--d", "2", "--M", "2", "--N", "64",
                      "--width", "4"}),
            0);
  EXPECT_TRUE(fs::exists(dir / "lr" / "lr_trace.csv"));
}

TEST(ConfigTest, ScalarsAndLists) {
  const SweepConfig c = parse_sweep_config(
      "d: [1, 2]\nM: 3\nsigma: [0.1, 0.5]\ndepth: [1, 3]\nscheme: [same, 4M]\n"
      "epsilon: [1, 0.5]\ntrials: 4\nn0: 8\nn_cap: 64\nseed: 9\nparallelism: 2\n"
      "epsilon_overrides:\n  - {d: 2, M: 3, epsilon: [2]}\n");
  EXPECT_EQ(c.d_list, (std::vector<std::size_t>{1, 2}));
  EXPECT_EQ(c.m_list, (std::vector<std::size_t>{3}));
  EXPECT_EQ(c.sigmas, (std::vector<double>{0.1, 0.5}));
  EXPECT_EQ(c.depths, (std::vector<int>{1, 3}));
  EXPECT_EQ(c.schemes, (std::vector<WidthVariant>{WidthVariant::same, WidthVariant::four_m}));
  EXPECT_EQ(c.trials, 4u);
  EXPECT_EQ(c.n0, 8u);
  EXPECT_EQ(c.n_cap, 64u);
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.parallelism, 2);
  EXPECT_EQ(c.epsilons_for({2, 3, 0.1}), std::vector<double>{2.0});
  EXPECT_TRUE(c.out_dir.empty());
}

TEST(ConfigTest, RejectsBadInput) {
  EXPECT_THROW(parse_sweep_config("d: [1\n"), ConfigError);
  EXPECT_THROW(parse_sweep_config("typo: 1\n"), ConfigError);
  EXPECT_THROW(parse_sweep_config("trials: many\n"), ConfigError);
  EXPECT_THROW(parse_sweep_config("scheme: widest\n"), ConfigError);
  EXPECT_THROW(parse_sweep_config("epsilon: -1\n"), ConfigError);
}

TEST(ConfigTest, CheckedInConfigsParse) {
  const fs::path configs = fs::path(TSBENCH_SOURCE_DIR) / "configs";
  int seen = 0;
  for (const auto& entry : fs::directory_iterator(configs)) {
    if (entry.path().extension() != ".yaml") continue;
    EXPECT_NO_THROW(load_sweep_config(entry.path())) << entry.path();
    ++seen;
  }
  EXPECT_GE(seen, 3);
}

}  // namespace
}  // namespace tsbench
