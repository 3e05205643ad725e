#pragma once

#include <cstddef>
#include <span>

namespace mixprobe::stats {

double mean(std::span<const double> xs);
// Unbiased sample variance; 0 for fewer than two samples.
double variance(std::span<const double> xs);

struct TestResult {
  double statistic = 0.0;
  double dof = 0.0;
  double p_value = 1.0;
};

// Welch's unequal-variance two-sample t-test, two-sided. Both samples need
// at least two values. Two constant samples give p = 1 if their means agree
// and p = 0 otherwise.
TestResult welch_t_test(std::span<const double> a, std::span<const double> b);

// OLS slope of y on x with the two-sided t-test for slope == 0.
struct TrendResult {
  double slope = 0.0;
  double p_value = 1.0;
};
TrendResult linear_trend_test(std::span<const double> x, std::span<const double> y);

// Pearson chi-square goodness of fit against equal cell probabilities.
TestResult chi_square_uniform(std::span<const double> counts);

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
  bool overlaps(const Interval& o) const { return lo <= o.hi && o.lo <= hi; }
};

// Wilson score interval for a binomial proportion (z = 1.96 for 95%).
Interval wilson_interval(std::size_t successes, std::size_t trials, double z = 1.959963984540054);

}  // namespace mixprobe::stats
