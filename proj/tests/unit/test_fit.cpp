#include <gtest/gtest.h>

#include <cmath>

#include "rte/error.hpp"
#include "rte/fit.hpp"

using namespace rte;

TEST(LinearFit, HandComputedExample) {
  // Mean (1.5, 1.25), Sxx = 5, Sxy = 4.5, SSE = 0.7, Syy = 4.75.
  const LinearFit f = linear_fit({0, 1, 2, 3}, {0, 1, 1, 3});
  EXPECT_NEAR(f.slope, 0.9, 1e-15);
  EXPECT_NEAR(f.intercept, -0.1, 1e-15);
  EXPECT_NEAR(f.r2, 1.0 - 0.7 / 4.75, 1e-14);
  EXPECT_NEAR(f.slope_stderr, std::sqrt(0.07), 1e-14);
  EXPECT_EQ(f.n, 4);
  EXPECT_NEAR(f.at(2.0), 1.7, 1e-15);
}

TEST(LinearFit, TwoPointsHaveNoStderr) {
  const LinearFit f = linear_fit({1, 2}, {3, 7});
  EXPECT_DOUBLE_EQ(f.slope, 4.0);
  EXPECT_DOUBLE_EQ(f.r2, 1.0);
  EXPECT_EQ(f.slope_stderr, 0.0);
}

TEST(LogLogFit, PowerLaw) {
  std::vector<double> x, y;
  for (double h : {0.1, 0.05, 0.025, 0.0125}) {
    x.push_back(h);
    y.push_back(3.0 * std::pow(h, 1.75));
  }
  const LinearFit f = loglog_fit(x, y);
  EXPECT_NEAR(f.slope, 1.75, 1e-12);
  EXPECT_NEAR(std::exp(f.intercept), 3.0, 1e-11);
  EXPECT_NEAR(f.r2, 1.0, 1e-12);
}

TEST(LinearFit, RejectsBadInput) {
  EXPECT_THROW(linear_fit({1}, {1}), ArgumentError);
  EXPECT_THROW(linear_fit({1, 2}, {1}), ArgumentError);
  EXPECT_THROW(linear_fit({2, 2, 2}, {1, 2, 3}), ArgumentError);
  EXPECT_THROW(loglog_fit({1, 0}, {1, 2}), ArgumentError);
  EXPECT_THROW(loglog_fit({1, 2}, {1, -2}), ArgumentError);
}
