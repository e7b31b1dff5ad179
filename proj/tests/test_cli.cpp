#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

#include <gtest/gtest.h>

#include "coopadapt/cli.hpp"
#include "support.hpp"

using namespace coopadapt;
using coopadapt::testing::scenario_path;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("coopadapt_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    // Short copy of the coupled scenario so runs stay fast.
    std::ofstream(dir_ / "short.json") << apply_overrides(slurp(scenario_path("coupled")), {{"duration_s", "0.5"}});
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, CsvRoundTripIsExact) {
  const RunResult r = run_scenario(load_scenario((dir_ / "short.json").string()));
  write_timeseries_csv((dir_ / "ts.csv").string(), r.series);
  const TimeSeries back = read_timeseries_csv((dir_ / "ts.csv").string());
  EXPECT_EQ(back.columns, r.series.columns);
  EXPECT_EQ(back.rows, r.series.rows);
}

TEST_F(CliTest, RunWritesThreeArtifacts) {
  std::ostringstream out, err;
  ASSERT_EQ(cmd_run((dir_ / "short.json").string(), (dir_ / "run").string(), 0, out, err), 0) << err.str();
  EXPECT_TRUE(fs::exists(dir_ / "run" / "timeseries.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "run" / "summary.json"));
  EXPECT_TRUE(fs::exists(dir_ / "run" / "scenario.resolved"));
  // The resolved scenario reproduces the run.
  const Scenario again = parse_scenario(slurp(dir_ / "run" / "scenario.resolved"));
  const RunResult r = run_scenario(again);
  EXPECT_EQ(read_timeseries_csv((dir_ / "run" / "timeseries.csv").string()).rows, r.series.rows);
}

TEST_F(CliTest, SingletonSweepEqualsRun) {
  std::ostringstream out, err;
  ASSERT_EQ(cmd_run((dir_ / "short.json").string(), (dir_ / "run").string(), 0, out, err), 0) << err.str();
  ASSERT_EQ(cmd_sweep((dir_ / "short.json").string(), (dir_ / "sweep").string(), {"network.k_coupling=5"}, 0, 1, out,
                      err),
            0)
      << err.str();
  EXPECT_TRUE(fs::exists(dir_ / "sweep" / "index.json"));
  fs::path point;
  for (const auto& e : fs::directory_iterator(dir_ / "sweep")) {
    if (e.is_directory()) point = e.path();
  }
  ASSERT_FALSE(point.empty());
  EXPECT_EQ(slurp(point / "timeseries.csv"), slurp(dir_ / "run" / "timeseries.csv"));
}

TEST_F(CliTest, SweepCrossProduct) {
  std::ostringstream out, err;
  ASSERT_EQ(cmd_sweep((dir_ / "short.json").string(), (dir_ / "grid").string(),
                      {"network.k_coupling=0,5", "robot_defaults.p_adapt=1,2"}, 0, 2, out, err),
            0)
      << err.str();
  int points = 0;
  for (const auto& e : fs::directory_iterator(dir_ / "grid")) points += e.is_directory();
  EXPECT_EQ(points, 4);
}

TEST(Cli, MalformedGridAxis) {
  EXPECT_THROW(parse_sweep_axis("no_equals"), std::invalid_argument);
  EXPECT_THROW(parse_sweep_axis("=1,2"), std::invalid_argument);
  EXPECT_THROW(parse_sweep_axis("a.b="), std::invalid_argument);
  EXPECT_THROW(parse_sweep_axis("a.b=1,,2"), std::invalid_argument);
  const SweepAxis ax = parse_sweep_axis("network.delay_s=0,0.25");
  EXPECT_EQ(ax.path, "network.delay_s");
  ASSERT_EQ(ax.values.size(), 2u);
  EXPECT_EQ(ax.values[1], "0.25");
}

TEST(Cli, OverridesEditNestedValues) {
  const std::string text = R"({"a": {"b": [1, 2, 3]}, "c": "x"})";
  const std::string out = apply_overrides(text, {{"a.b.1", "7"}, {"c", "y"}, {"d.e", "[1,2]"}});
  EXPECT_EQ(out.find("7") != std::string::npos, true);
  EXPECT_NE(out.find("\"y\""), std::string::npos);
  EXPECT_NE(out.find("\"e\""), std::string::npos);
  EXPECT_THROW(apply_overrides(text, {{"a.b.9", "1"}}), std::invalid_argument);
}

TEST(Cli, ValidateExitCodes) {
  std::ostringstream out, err;
  EXPECT_EQ(cmd_validate(scenario_path("switching3"), out, err), 0);
  EXPECT_NE(cmd_validate(scenario_path("switching3_disconnected"), out, err), 0);
  EXPECT_NE(cmd_validate("/nonexistent/scenario.json", out, err), 0);
}

TEST_F(CliTest, PeReportFromLog) {
  std::ofstream(dir_ / "dec.json") << apply_overrides(slurp(scenario_path("decoupled")), {{"duration_s", "20"}});
  std::ostringstream out, err;
  ASSERT_EQ(cmd_run((dir_ / "dec.json").string(), (dir_ / "dec").string(), 0, out, err), 0) << err.str();
  const Scenario sc = parse_scenario(slurp(dir_ / "dec" / "scenario.resolved"));
  const PeReport rep = pe_report_from_log(sc, read_timeseries_csv((dir_ / "dec" / "timeseries.csv").string()));
  ASSERT_EQ(rep.robots.size(), 2u);
  EXPECT_EQ(rep.robots[0].deficient, std::vector<std::string>{"izz"});
  EXPECT_EQ(rep.robots[1].deficient, std::vector<std::string>{"m"});
  EXPECT_GT(rep.collective, 0.0);
  std::ostringstream report;
  EXPECT_EQ(cmd_pe_report((dir_ / "dec").string(), "", true, report, err), 0) << err.str();
  EXPECT_NE(report.str().find("collective"), std::string::npos);
}
