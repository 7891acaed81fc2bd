#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>

#include "collapse/error.hpp"
#include "collapse/numfmt.hpp"
#include "collapse/records.hpp"
#include "test_util.hpp"

using namespace collapse;

TEST(NumFmt, RoundTripsDoubles) {
  Rng rng(0);
  for (int i = 0; i < 1000; ++i) {
    const double v = std::ldexp(rng.normal(), static_cast<int>(rng.index(200)) - 100);
    EXPECT_EQ(*parse_double(format_double(v)), v);
  }
  EXPECT_EQ(format_double(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_TRUE(std::isnan(*parse_double("nan")));
  EXPECT_FALSE(parse_double("1.5x"));
  EXPECT_EQ(format_fixed(2.345, 1), "2.3");
}

TEST(Records, RoundTripIsByteIdentical) {
  const RunResult r = run_recursive(test::small_text_spec(1));
  const std::string text = format_records({r});
  const auto back = parse_records(text);
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(format_records(back), text);
  EXPECT_EQ(back[0].onsets, r.onsets);
  ASSERT_EQ(back[0].records.size(), r.records.size());
  for (std::size_t g = 0; g < r.records.size(); ++g) {
    EXPECT_EQ(back[0].records[g].snap.H, r.records[g].snap.H);
    EXPECT_EQ(back[0].records[g].snap.S, r.records[g].snap.S);
    EXPECT_EQ(back[0].records[g].alpha_eff, r.records[g].alpha_eff);
  }
}

TEST(Records, SameSeedSameBytes) {
  const auto a = format_records({run_recursive(test::small_text_spec(2))});
  const auto b = format_records({run_recursive(test::small_text_spec(2))});
  EXPECT_EQ(a, b);
  EXPECT_NE(a, format_records({run_recursive(test::small_text_spec(3))}));
}

TEST(Records, ModalitySpecificColumnsAreEmpty) {
  const std::string text = format_records({run_recursive(test::small_text_spec(0))});
  EXPECT_EQ(text.substr(0, text.find('\n')), records_header);
  // text runs: tail_coverage (13th column) is empty; the drift column is empty at g=0
  const std::string row0 = text.substr(text.find('\n') + 1, text.find('\n', text.find('\n') + 1) - text.find('\n') - 1);
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (std::size_t p; (p = row0.find(',', start)) != std::string::npos; start = p + 1) fields.push_back(row0.substr(start, p - start));
  fields.push_back(row0.substr(start));
  ASSERT_EQ(fields.size(), 16u);
  EXPECT_EQ(fields[5], "");
  EXPECT_EQ(fields[12], "");
  EXPECT_NE(fields[11], "");
}

TEST(Records, ParseRejectsMalformedInput) {
  EXPECT_THROW(parse_records("nope\n"), Error);
  const std::string good = format_records({run_recursive(test::small_text_spec(0))});
  std::string bad = good;
  while (bad.back() == '\n') bad.pop_back();
  bad.erase(bad.rfind(','));  // drop the last field of the last row
  EXPECT_THROW(parse_records(bad), Error);
}

TEST(Records, NonFinitePerplexityMarksDivergence) {
  RunResult r = run_recursive(test::small_text_spec(0));
  r.records.back().snap.ppl = std::numeric_limits<double>::infinity();
  const auto back = parse_records(format_records({r}));
  ASSERT_TRUE(back[0].diverged_at);
  EXPECT_EQ(*back[0].diverged_at, r.records.back().snap.g);
}

TEST(Records, OnsetsJsonFields) {
  const RunResult r = run_recursive(test::small_text_spec(0));
  const std::string j = format_onsets_json(r);
  for (const char* k : {"run_id", "hidden_onset", "visible_onset", "lead_time", "mean_alpha"})
    EXPECT_NE(j.find(k), std::string::npos) << k;
}

TEST(Records, OutputDirHonoursEnvironment) {
  ::setenv(output_dir_env, "/tmp/elsewhere", 1);
  EXPECT_EQ(default_output_dir(), std::filesystem::path("/tmp/elsewhere"));
  ::unsetenv(output_dir_env);
  EXPECT_EQ(default_output_dir(), std::filesystem::path("runs"));
}

TEST(Records, WriteRunLayout) {
  test::TempDir dir;
  const RunSpec spec = test::small_text_spec(0);
  const RunResult r = run_recursive(spec, directory_sink(dir.path(), spec.id()));
  write_run(dir.path(), r);
  EXPECT_TRUE(std::filesystem::exists(dir.path() / "open_loop_s0" / "records.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir.path() / "open_loop_s0" / "onsets.json"));
  for (int g = 0; g <= spec.generations; ++g)
    EXPECT_TRUE(std::filesystem::exists(checkpoint_path(dir.path(), "open_loop_s0", g))) << g;
}

TEST(Records, RecoveryRoundTrip) {
  RecoveryResult a;
  a.checkpoint = 4;
  a.budget = {"weak", 0.005, 400};
  a.ppl = 21.5;
  a.H = 0.3;
  const auto rows = parse_recovery(format_recovery("open_loop_s0", {a}));
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].budget, "weak");
  EXPECT_EQ(rows[0].steps, 400);
  EXPECT_DOUBLE_EQ(rows[0].ppl, 21.5);
}
