#include "mixprobe/stats.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <stdexcept>

namespace mixprobe::stats {

namespace {

double two_sided_t(double t, double dof) {
  boost::math::students_t dist(dof);
  return 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
}

}  // namespace

double mean(std::span<const double> xs) {
  if (xs.empty()) throw std::invalid_argument("mean of an empty sample");
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double variance(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return s / static_cast<double>(xs.size() - 1);
}

TestResult welch_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2)
    throw std::invalid_argument("Welch t-test needs at least two samples per group");
  const double ma = mean(a), mb = mean(b);
  const double va = variance(a) / static_cast<double>(a.size());
  const double vb = variance(b) / static_cast<double>(b.size());
  TestResult r;
  if (va + vb == 0.0) {
    r.p_value = ma == mb ? 1.0 : 0.0;
    r.statistic = ma == mb ? 0.0 : INFINITY;
    return r;
  }
  r.statistic = (ma - mb) / std::sqrt(va + vb);
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  r.dof = (va + vb) * (va + vb) / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
  r.p_value = two_sided_t(r.statistic, r.dof);
  return r;
}

TrendResult linear_trend_test(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 3)
    throw std::invalid_argument("trend test needs >= 3 paired points");
  const double mx = mean(x), my = mean(y);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("trend test needs distinct x values");
  TrendResult r;
  r.slope = sxy / sxx;
  const double intercept = my - r.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (intercept + r.slope * x[i]);
    sse += e * e;
  }
  const double dof = static_cast<double>(x.size()) - 2.0;
  const double se = std::sqrt(sse / dof / sxx);
  if (se == 0.0) {
    r.p_value = r.slope == 0.0 ? 1.0 : 0.0;
    return r;
  }
  r.p_value = two_sided_t(r.slope / se, dof);
  return r;
}

TestResult chi_square_uniform(std::span<const double> counts) {
  if (counts.size() < 2) throw std::invalid_argument("chi-square needs >= 2 cells");
  double total = 0.0;
  for (double c : counts) total += c;
  if (!(total > 0.0)) throw std::invalid_argument("chi-square of empty counts");
  const double expected = total / static_cast<double>(counts.size());
  TestResult r;
  for (double c : counts) r.statistic += (c - expected) * (c - expected) / expected;
  r.dof = static_cast<double>(counts.size() - 1);
  boost::math::chi_squared dist(r.dof);
  r.p_value = boost::math::cdf(boost::math::complement(dist, r.statistic));
  return r;
}

Interval wilson_interval(std::size_t successes, std::size_t trials, double z) {
  if (trials == 0) throw std::invalid_argument("Wilson interval with zero trials");
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / (1.0 + z2 / n);
  const double lo = successes == 0 ? 0.0 : std::max(0.0, centre - half);
  const double hi = successes == trials ? 1.0 : std::min(1.0, centre + half);
  return Interval{lo, hi};
}

}  // namespace mixprobe::stats
