#include <gtest/gtest.h>

#include <cmath>

#include "collapse/error.hpp"
#include "collapse/stats.hpp"

using namespace collapse;

TEST(Stats, MeanAndSampleStd) {
  EXPECT_DOUBLE_EQ(mean({1, 2, 3, 4}), 2.5);
  // sum of squares 5 over n - 1 = 3
  EXPECT_NEAR(sample_std({1, 2, 3, 4}), std::sqrt(5.0 / 3.0), 1e-15);
  EXPECT_EQ(sample_std({42}), 0.0);
}

TEST(Stats, QuartilesTypeSeven) {
  const auto q = quartiles({3, 1, 4, 1, 5, 9, 2, 6});
  EXPECT_DOUBLE_EQ(q.q1, 1.75);
  EXPECT_DOUBLE_EQ(q.median, 3.5);
  EXPECT_DOUBLE_EQ(q.q3, 5.25);
  EXPECT_DOUBLE_EQ(median({5}), 5.0);
  EXPECT_DOUBLE_EQ(quantile({1, 2}, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(quantile({1, 2}, 1.0), 2.0);
}

TEST(Stats, EmptyInputFails) {
  EXPECT_THROW(mean({}), Error);
  EXPECT_THROW(quantile({}, 0.5), Error);
}
