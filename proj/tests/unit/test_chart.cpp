#include <gtest/gtest.h>

#include "collapse/chart.hpp"
#include "collapse/error.hpp"
#include "test_util.hpp"

using namespace collapse;

namespace {

RunResult synthetic_run(const std::string& id, std::vector<double> h, std::vector<double> ppl) {
  RunResult r;
  r.run_id = id;
  r.label = "open_loop";
  for (std::size_t g = 0; g < h.size(); ++g) {
    TrajectoryRecord rec;
    rec.snap.g = static_cast<int>(g);
    rec.snap.H = h[g];
    rec.snap.ppl = ppl[g];
    r.records.push_back(rec);
  }
  apply_onsets(r);
  return r;
}

std::size_t count(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = s.find(needle); p != std::string::npos; p = s.find(needle, p + 1)) ++n;
  return n;
}

}  // namespace

TEST(Chart, DeterministicOutput) {
  const auto r = synthetic_run("a", {1, 0.8, 0.4, 0.3}, {10, 11, 60, 80});
  EXPECT_EQ(render_chart({r}, {"H", "ppl"}), render_chart({r}, {"H", "ppl"}));
}

TEST(Chart, OnsetMarkers) {
  // hidden at g=2 (0.4 < 0.5), visible at g=2 (60 > 5 * 10)
  const auto r = synthetic_run("a", {1, 0.8, 0.4, 0.3}, {10, 11, 60, 80});
  ASSERT_EQ(r.onsets.hidden, 2);
  ASSERT_EQ(r.onsets.visible, 2);
  const std::string svg = render_chart({r}, {"H", "ppl"});
  EXPECT_NE(svg.find("<svg"), std::string::npos);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
  // one marker of each kind per panel
  EXPECT_EQ(count(svg, "data-onset=\"hidden\""), 2u);
  EXPECT_EQ(count(svg, "data-onset=\"visible\""), 2u);
  EXPECT_NE(svg.find("data-gen=\"2\""), std::string::npos);
}

TEST(Chart, NoMarkersWithoutOnsets) {
  const auto r = synthetic_run("b", {1, 0.9, 0.9}, {10, 10, 10});
  EXPECT_EQ(count(render_chart({r}, {"H"}), "class=\"onset\""), 0u);
}

TEST(Chart, OneSeriesPerRun) {
  const auto a = synthetic_run("a", {1, 0.8, 0.4}, {10, 11, 60});
  const auto b = synthetic_run("b", {1, 0.9, 0.9}, {10, 10, 10});
  EXPECT_EQ(count(render_chart({a, b}, {"H"}), "<polyline"), 2u);
}

TEST(Chart, Errors) {
  const auto r = synthetic_run("a", {1, 0.8}, {10, 11});
  try {
    render_chart({r}, {"entropy"});
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("alpha_eff"), std::string::npos) << "valid names are listed";
  }
  EXPECT_THROW(render_chart({}, {"H"}), Error);
  EXPECT_THROW(render_chart({synthetic_run("c", {1}, {10})}, {"H"}), Error);
}

TEST(Chart, EmitWritesFile) {
  test::TempDir dir;
  const auto r = synthetic_run("a", {1, 0.8, 0.4}, {10, 11, 60});
  emit_chart({r}, {"H"}, dir.path() / "c.svg");
  EXPECT_TRUE(std::filesystem::exists(dir.path() / "c.svg"));
}
