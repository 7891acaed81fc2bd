#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "collapse/error.hpp"
#include "collapse/regulator.hpp"

using namespace collapse;

TEST(Trust, ClipsSquaredRatio) {
  EXPECT_DOUBLE_EQ(update_trust(1.0, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(update_trust(1.2, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(update_trust(0.1, 1.0), 0.2);
  EXPECT_NEAR(update_trust(0.8, 1.0), 0.64, 1e-15);
  EXPECT_THROW(update_trust(0.5, 0.0), Error);
}

TEST(Trust, AlwaysInRangeProperty) {
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const double t = update_trust(3.0 * rng.uniform(), 0.01 + rng.uniform());
    EXPECT_GE(t, 0.2);
    EXPECT_LE(t, 1.0);
  }
}

TEST(Planned, HoldsLastValue) {
  MixingSchedule s;
  EXPECT_EQ(planned_alpha(s, 0), 0.0);
  EXPECT_EQ(planned_alpha(s, 3), 0.75);
  EXPECT_EQ(planned_alpha(s, 12), 1.0);
  EXPECT_THROW(planned_alpha(s, -1), Error);
}

TEST(EffectiveAlpha, Modes) {
  MixingSchedule s;
  EXPECT_DOUBLE_EQ(effective_alpha(s, 2, 0.4, nullptr).alpha_eff, 0.5);
  s.mode = ScheduleMode::mtr;
  EXPECT_DOUBLE_EQ(effective_alpha(s, 2, 0.4, nullptr).alpha_eff, 0.2);
  s.mode = ScheduleMode::fixed_alpha;
  s.fixed_alpha = 0.3;
  EXPECT_DOUBLE_EQ(effective_alpha(s, 0, 0.4, nullptr).alpha_eff, 0.0);
  EXPECT_DOUBLE_EQ(effective_alpha(s, 5, 0.4, nullptr).alpha_eff, 0.3);
  s.mode = ScheduleMode::random_tau;
  try {
    effective_alpha(s, 1, 1.0, nullptr);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::missing_source);
  }
}

TEST(EffectiveAlpha, NeverExceedsPlannedUnderMtrProperty) {
  MixingSchedule s;
  s.mode = ScheduleMode::mtr;
  Rng rng(2);
  for (int i = 0; i < 500; ++i) {
    const int g = static_cast<int>(rng.index(20));
    const auto d = effective_alpha(s, g, update_trust(rng.uniform(), 1.0), nullptr);
    EXPECT_LE(d.alpha_eff, d.alpha_planned);
    EXPECT_GE(d.alpha_eff, 0.2 * d.alpha_planned - 1e-15);
  }
}

TEST(TauReplay, IsPermutationOfSource) {
  const std::vector<double> src = {0.2, 0.4, 0.6, 0.8, 1.0};
  TauReplay r(src, Rng(3));
  for (int round = 0; round < 3; ++round) {
    std::vector<double> got;
    for (std::size_t i = 0; i < src.size(); ++i) got.push_back(r.next());
    std::sort(got.begin(), got.end());
    EXPECT_EQ(got, src);
  }
  EXPECT_THROW(TauReplay({}, Rng(0)), Error);
}

TEST(Schedule, ValidateAndParse) {
  MixingSchedule s;
  s.fixed_alpha = 1.5;
  EXPECT_THROW(s.validate(), Error);
  s = MixingSchedule{};
  s.mode = ScheduleMode::random_tau;
  EXPECT_THROW(s.validate(), Error);
  s.tau_source = {0.5};
  EXPECT_NO_THROW(s.validate());
  for (auto m : {ScheduleMode::open_loop, ScheduleMode::mtr, ScheduleMode::fixed_alpha, ScheduleMode::random_tau})
    EXPECT_EQ(parse_schedule_mode(to_string(m)), m);
  EXPECT_FALSE(parse_schedule_mode("closed_loop"));
}

TEST(Mix, ExactCountsWithoutReplacement) {
  std::vector<int> real(100), syn(100);
  for (int i = 0; i < 100; ++i) {
    real[i] = i;
    syn[i] = 1000 + i;
  }
  Rng rng(9);
  const auto m = mix(real, syn, 0.25, 40, rng);
  ASSERT_EQ(m.items.size(), 40u);
  EXPECT_EQ(m.synthetic_count, 10u);
  EXPECT_DOUBLE_EQ(m.synthetic_fraction, 0.25);
  EXPECT_FALSE(m.resampled);
  EXPECT_EQ(std::count_if(m.items.begin(), m.items.end(), [](int x) { return x >= 1000; }), 10);
  EXPECT_EQ(std::set<int>(m.items.begin(), m.items.end()).size(), 40u);
}

TEST(Mix, RoundsQuota) {
  EXPECT_EQ(synthetic_quota(0.5, 7), 4u);
  EXPECT_EQ(synthetic_quota(0.3, 10), 3u);
  EXPECT_EQ(synthetic_quota(1.0, 800), 800u);
}

TEST(Mix, ResamplesWhenPoolTooSmall) {
  std::vector<int> real(50, 0), syn = {1, 2, 3};
  Rng rng(0);
  const auto m = mix(real, syn, 0.5, 20, rng);
  EXPECT_TRUE(m.resampled);
  EXPECT_EQ(m.synthetic_count, 10u);
}

TEST(Mix, EmptyPoolWithQuotaFails) {
  Rng rng(0);
  try {
    mix(std::vector<int>{1, 2}, std::vector<int>{}, 0.5, 4, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::empty_data);
  }
  EXPECT_NO_THROW(mix(std::vector<int>{1, 2}, std::vector<int>{}, 0.0, 4, rng));
  EXPECT_THROW(mix(std::vector<int>{1}, std::vector<int>{1}, 1.5, 4, rng), Error);
}

TEST(Mix, CorpusOriginAndRealizedFraction) {
  Corpus real, syn;
  real.sequences.assign(10, {0});
  syn.sequences.assign(10, {1});
  Rng rng(1);
  double realized = -1;
  EXPECT_EQ(mix(real, syn, 0.0, 10, rng, &realized).origin, Origin::real);
  EXPECT_EQ(realized, 0.0);
  EXPECT_EQ(mix(real, syn, 1.0, 10, rng, &realized).origin, Origin::synthetic);
  EXPECT_EQ(mix(real, syn, 0.3, 10, rng, &realized).origin, Origin::mixed);
  EXPECT_DOUBLE_EQ(realized, 0.3);
}

TEST(MixProperty, CountsMatchQuota) {
  Rng gen(44);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + gen.index(100);
    const double alpha = gen.uniform();
    std::vector<int> real(n, 0), syn(n, 1);
    const auto m = mix(real, syn, alpha, n, gen);
    EXPECT_EQ(m.items.size(), n);
    EXPECT_EQ(static_cast<std::size_t>(std::count(m.items.begin(), m.items.end(), 1)), synthetic_quota(alpha, n));
  }
}
