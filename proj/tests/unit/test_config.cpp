#include <gtest/gtest.h>

#include "collapse/config.hpp"
#include "collapse/error.hpp"
#include "collapse/records.hpp"
#include "test_util.hpp"

using namespace collapse;

namespace {

std::string config_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::config) << e.what();
    return e.what();
  }
  ADD_FAILURE() << "config accepted: " << text;
  return {};
}

}  // namespace

TEST(Config, EmptyObjectGivesDefaults) {
  const auto cfg = parse_config("{}");
  ASSERT_EQ(cfg.specs.size(), 1u);
  const RunSpec& s = cfg.specs[0];
  EXPECT_EQ(s.kind, LearnerKind::markov);
  EXPECT_EQ(s.generations, 12);
  EXPECT_EQ(s.train_size, 800);
  EXPECT_EQ(s.text_world.vocab, 64);
  EXPECT_EQ(s.markov.order, 2);
  EXPECT_DOUBLE_EQ(s.markov.top_p, 0.9);
  EXPECT_DOUBLE_EQ(s.markov.temperature, 0.7);
  EXPECT_EQ(s.schedule.mode, ScheduleMode::open_loop);
  EXPECT_EQ(s.schedule.planned, (std::vector<double>{0, 0.25, 0.5, 0.75, 1.0}));
  EXPECT_EQ(s.monitor.window, 1);
  EXPECT_DOUBLE_EQ(cfg.low_alpha, 0.5);
}

TEST(Config, SeedRangesExpand) {
  EXPECT_EQ(expand_seed_range("3..6"), (std::vector<std::uint64_t>{3, 4, 5, 6}));
  EXPECT_EQ(expand_seed_range("7"), (std::vector<std::uint64_t>{7}));
  EXPECT_THROW(expand_seed_range("6..3"), Error);
  EXPECT_THROW(expand_seed_range("a..b"), Error);
  const auto cfg = parse_config(R"({"run": {"seeds": [0, "4..5", 9]}})");
  ASSERT_EQ(cfg.specs.size(), 4u);
  EXPECT_EQ(cfg.specs[1].seed, 4u);
  EXPECT_EQ(cfg.specs[3].seed, 9u);
  EXPECT_EQ(cfg.specs[3].id(), "open_loop_s9");
}

TEST(Config, ErrorsNameTheField) {
  EXPECT_NE(config_error(R"({"schedule": {"fixed_alpha": 1.5}})").find("schedule.fixed_alpha"), std::string::npos);
  EXPECT_NE(config_error(R"({"learner": {"top_p": 0}})").find("learner.top_p"), std::string::npos);
  EXPECT_NE(config_error(R"({"run": {"generations": "ten"}})").find("run.generations"), std::string::npos);
  EXPECT_NE(config_error(R"({"monitor": {"windw": 2}})").find("monitor.windw"), std::string::npos);
  EXPECT_NE(config_error(R"({"bogus": {}})").find("bogus"), std::string::npos);
  EXPECT_NE(config_error(R"({"schedule": {"mode": "closed"}})").find("schedule.mode"), std::string::npos);
}

TEST(Config, SyntaxErrorsReportPosition) {
  const std::string msg = config_error("{\n  \"run\": {\"seed\": 1,}\n}");
  EXPECT_NE(msg.find("line 2"), std::string::npos) << msg;
}

TEST(Config, KindSpecificKeys) {
  const auto cfg = parse_config(R"({"learner": {"kind": "softmax", "C": 6, "eta": 0.2}})");
  EXPECT_EQ(cfg.specs[0].kind, LearnerKind::softmax);
  EXPECT_EQ(cfg.specs[0].feature_world.classes, 6);
  EXPECT_NE(config_error(R"({"learner": {"kind": "softmax", "V": 6}})").find("learner.V"), std::string::npos);
}

TEST(Config, RandomTauNeedsSource) {
  EXPECT_NE(config_error(R"({"schedule": {"mode": "random_tau"}})").find("tau_source"), std::string::npos);
  const auto inline_taus = parse_config(R"({"schedule": {"mode": "random_tau", "tau_source": [0.5, 1.0]}})");
  EXPECT_EQ(inline_taus.specs[0].schedule.tau_source, (std::vector<double>{0.5, 1.0}));
  EXPECT_TRUE(parse_config(R"({"schedule": {"mode": "random_tau", "tau_source": "mtr"}})").tau_from_mtr);
}

TEST(Config, TauSourceFromRecordsFile) {
  test::TempDir dir;
  RunSpec s = test::small_text_spec(3);
  s.schedule.mode = ScheduleMode::mtr;
  s.label = "mtr";
  const RunResult r = run_recursive(s);
  write_records({r}, dir.path() / "mtr.csv");
  const auto cfg = parse_config(
      R"({"run": {"seed": 3}, "schedule": {"mode": "random_tau", "tau_source": "mtr.csv"}})", dir.path());
  std::vector<double> expect;
  for (const auto& rec : r.records)
    if (rec.snap.g >= 1) expect.push_back(rec.tau);
  ASSERT_EQ(cfg.specs[0].schedule.tau_source.size(), expect.size());
  for (std::size_t i = 0; i < expect.size(); ++i) EXPECT_DOUBLE_EQ(cfg.specs[0].schedule.tau_source[i], expect[i]);
}

TEST(Config, LoadReportsMissingFile) {
  try {
    load_config("/nonexistent/config.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::not_found);
  }
}

TEST(Config, ResolvedJsonRoundTrips) {
  const auto cfg = parse_config(R"({"run": {"seeds": "1..2", "generations": 5}, "learner": {"lambda": 0.01}})");
  const auto again = parse_config(resolved_config_json(cfg));
  ASSERT_EQ(again.specs.size(), 2u);
  EXPECT_EQ(again.specs[1].seed, 2u);
  EXPECT_EQ(again.specs[0].generations, 5);
  EXPECT_DOUBLE_EQ(again.specs[0].markov.smoothing, 0.01);
  EXPECT_EQ(resolved_config_json(again), resolved_config_json(cfg));
}

TEST(Config, ShippedConfigsParse) {
  for (const char* name : {"open_loop.json", "mtr.json", "sweep.json", "recovery.json"})
    EXPECT_NO_THROW(load_config(std::filesystem::path(COLLAPSE_LAB_SOURCE_DIR) / "configs" / name)) << name;
}
