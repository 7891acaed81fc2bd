#include <gtest/gtest.h>

#include <sstream>

#include "cli.hpp"
#include "collapse/records.hpp"
#include "test_util.hpp"

using namespace collapse;

namespace {

struct CliResult {
  int code;
  std::string out, err;
};

CliResult cli(std::vector<std::string> args) {
  args.insert(args.begin(), "collapse-lab");
  std::ostringstream out, err;
  const int code = cli_main(args, out, err);
  return {code, out.str(), err.str()};
}

const char* small_config = R"({
  "learner": {"V": 16},
  "world": {"tail": 6},
  "run": {"seeds": "0..1", "generations": 4, "train_size": 200, "real_pool": 200,
          "validation": 60, "anchors": 40, "seq_len": 10}
})";

}  // namespace

TEST(Cli, NoArgumentsIsUsageError) { EXPECT_EQ(cli({}).code, 2); }

TEST(Cli, UnknownSubcommandIsUsageError) { EXPECT_EQ(cli({"frobnicate"}).code, 2); }

TEST(Cli, MissingConfigFailsCleanly) {
  const auto r = cli({"run", "/nonexistent/config.json", "--out", "/tmp"});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("config.json"), std::string::npos) << r.err;
}

TEST(Cli, ConfigErrorIsReported) {
  test::TempDir dir;
  write_text_file(dir.path() / "bad.json", R"({"schedule": {"fixed_alpha": 2}})");
  const auto r = cli({"run", (dir.path() / "bad.json").string(), "--out", dir.path().string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("schedule.fixed_alpha"), std::string::npos) << r.err;
}

TEST(Cli, RunThenDetect) {
  test::TempDir dir;
  write_text_file(dir.path() / "c.json", small_config);
  const auto run = cli({"run", (dir.path() / "c.json").string(), "--out", dir.path().string()});
  ASSERT_EQ(run.code, 0) << run.err;
  EXPECT_TRUE(std::filesystem::exists(dir.path() / "config.resolved.json"));
  EXPECT_TRUE(std::filesystem::exists(dir.path() / "open_loop_s1" / "records.csv"));
  EXPECT_TRUE(std::filesystem::exists(checkpoint_path(dir.path(), "open_loop_s0", 4)));
  const auto det = cli({"detect", (dir.path() / "records.csv").string()});
  ASSERT_EQ(det.code, 0) << det.err;
  EXPECT_NE(det.out.find("open_loop_s0: hidden="), std::string::npos);
  EXPECT_NE(det.out.find("open_loop_s1: hidden="), std::string::npos);
}

TEST(Cli, SweepThenReport) {
  test::TempDir dir;
  write_text_file(dir.path() / "c.json", small_config);
  const auto sweep = cli({"sweep", (dir.path() / "c.json").string(), "--out", dir.path().string()});
  ASSERT_EQ(sweep.code, 0) << sweep.err;
  for (const char* f : {"controls.txt", "controls.csv", "same_pressure.txt", "onsets.csv", "records.csv"})
    EXPECT_TRUE(std::filesystem::exists(dir.path() / f)) << f;
  const std::string records = (dir.path() / "records.csv").string();
  const auto table = cli({"report", records, "--table", "controls", "--format", "csv"});
  ASSERT_EQ(table.code, 0) << table.err;
  EXPECT_NE(table.out.find("random_tau"), std::string::npos);
  EXPECT_EQ(table.out.find("fixed_same_pressure"), std::string::npos);
  const auto chart = cli({"report", records, "--chart", "H,ppl", "--runs", "mtr_s0,open_loop_s0", "--out",
                          (dir.path() / "c.svg").string()});
  ASSERT_EQ(chart.code, 0) << chart.err;
  EXPECT_NE(read_text_file(dir.path() / "c.svg").find("mtr_s0"), std::string::npos);
}

TEST(Cli, ReportNeedsTableOrChart) {
  test::TempDir dir;
  write_text_file(dir.path() / "r.csv", format_records({run_recursive(test::small_text_spec(0))}));
  EXPECT_EQ(cli({"report", (dir.path() / "r.csv").string()}).code, 2);
  EXPECT_EQ(cli({"report", (dir.path() / "r.csv").string(), "--table", "nonsense"}).code, 1);
  EXPECT_EQ(cli({"report", (dir.path() / "r.csv").string(), "--chart", "nonsense"}).code, 1);
}

TEST(Cli, RecoverRunsSourceWhenMissing) {
  test::TempDir dir;
  write_text_file(dir.path() / "c.json", R"({
    "learner": {"V": 16}, "world": {"tail": 6},
    "run": {"seed": 0, "generations": 4, "train_size": 200, "real_pool": 200, "validation": 60,
            "anchors": 40, "seq_len": 10},
    "recovery": {"checkpoints": [2, 4], "real_fractions": [0.1], "steps": [100], "budget_names": ["b"]}
  })");
  const auto r = cli({"recover", (dir.path() / "c.json").string(), "--out", dir.path().string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = parse_recovery(read_text_file(dir.path() / "open_loop_s0" / "recovery.csv"));
  EXPECT_EQ(rows.size(), 2u);
}
