#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "mixprobe/stats.hpp"

using namespace mixprobe;

TEST(Stats, MeanVariance) {
  const std::vector<double> x{2, 4, 4, 4, 5, 5, 7, 9};
  EXPECT_DOUBLE_EQ(stats::mean(x), 5.0);
  EXPECT_DOUBLE_EQ(stats::variance(x), 32.0 / 7.0);
  EXPECT_DOUBLE_EQ(stats::variance(std::vector<double>{1.0}), 0.0);
}

TEST(Stats, WelchKnownAnswer) {
  // Statistic and dof from the Welch formulas; p from a reference table.
  const std::vector<double> a{20.2, 20.5, 20.9, 21.1, 20.3};
  const std::vector<double> b{19.8, 21.5, 22.4, 24.9, 21.9};
  const double va = stats::variance(a), vb = stats::variance(b);
  const double se = std::sqrt(va / 5 + vb / 5);
  const double t = (stats::mean(a) - stats::mean(b)) / se;
  const double df = std::pow(va / 5 + vb / 5, 2) /
                    (std::pow(va / 5, 2) / 4 + std::pow(vb / 5, 2) / 4);
  const auto r = stats::welch_t_test(a, b);
  EXPECT_NEAR(r.statistic, t, 1e-12);
  EXPECT_NEAR(r.dof, df, 1e-12);
  EXPECT_NEAR(r.dof, 4.3517403, 1e-6);
  EXPECT_NEAR(r.p_value, 0.1440534, 1e-6);
}

TEST(Stats, WelchStandardCase) {
  // Equal variances 2.5, n = 5: t = -5, dof = 8, two-sided p = 0.0010528.
  const std::vector<double> a{1, 2, 3, 4, 5}, b{6, 7, 8, 9, 10};
  const auto r = stats::welch_t_test(a, b);
  EXPECT_NEAR(r.statistic, -5.0, 1e-12);
  EXPECT_NEAR(r.dof, 8.0, 1e-12);
  EXPECT_NEAR(r.p_value, 0.0010528, 2e-6);
}

TEST(Stats, WelchDetectsShiftedNormals) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n0(0, 1), n1(1, 1);
  std::vector<double> a, b;
  for (int i = 0; i < 1000; ++i) {
    a.push_back(n0(rng));
    b.push_back(n1(rng));
  }
  EXPECT_LT(stats::welch_t_test(a, b).p_value, 1e-10);
  EXPECT_GT(stats::welch_t_test(a, a).p_value, 0.99);
}

TEST(Stats, WelchDegenerate) {
  const std::vector<double> c{1, 1, 1}, d{2, 2};
  EXPECT_EQ(stats::welch_t_test(c, c).p_value, 1.0);
  EXPECT_EQ(stats::welch_t_test(c, d).p_value, 0.0);
  EXPECT_THROW(stats::welch_t_test(std::vector<double>{1}, c), std::invalid_argument);
}

TEST(Stats, TrendTest) {
  std::vector<double> x, flat, rising;
  std::mt19937_64 rng(2);
  std::normal_distribution<double> noise(0, 1);
  for (int i = 0; i < 500; ++i) {
    x.push_back(i);
    flat.push_back(noise(rng));
    rising.push_back(0.01 * i + noise(rng));
  }
  EXPECT_GT(stats::linear_trend_test(x, flat).p_value, 0.05);
  const auto r = stats::linear_trend_test(x, rising);
  EXPECT_LT(r.p_value, 1e-6);
  EXPECT_NEAR(r.slope, 0.01, 0.003);
}

TEST(Stats, ChiSquareUniform) {
  const std::vector<double> even{100, 100, 100, 100};
  EXPECT_NEAR(stats::chi_square_uniform(even).p_value, 1.0, 1e-12);
  // chi2 = (400/4)*... : counts 150,50,100,100 -> chi2 = 50, dof 3
  const std::vector<double> skew{150, 50, 100, 100};
  const auto r = stats::chi_square_uniform(skew);
  EXPECT_NEAR(r.statistic, 50.0, 1e-12);
  EXPECT_EQ(r.dof, 3.0);
  EXPECT_LT(r.p_value, 1e-9);
}

TEST(Stats, WilsonInterval) {
  // 80 / 100 at z = 1.96: [0.7112, 0.8666] (standard table value).
  const auto w = stats::wilson_interval(80, 100);
  EXPECT_NEAR(w.lo, 0.7112, 5e-4);
  EXPECT_NEAR(w.hi, 0.8666, 5e-4);
  const auto z = stats::wilson_interval(0, 50);
  EXPECT_EQ(z.lo, 0.0);
  EXPECT_GT(z.hi, 0.0);
  EXPECT_TRUE(w.overlaps(stats::Interval{0.86, 0.9}));
  EXPECT_FALSE(w.overlaps(stats::Interval{0.9, 1.0}));
}
