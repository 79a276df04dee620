#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>

#include <boost/math/distributions/students_t.hpp>

#include "transart/error.hpp"

namespace transart::metrics {

struct TTestResult {
  double t = 0.0;
  int df = 0;
  double p_two_sided = 1.0;
  std::string direction;  // "a>b", "a<b" or "a=b"
  bool significant = false;
};

/// Paired two-sided t-test on d = a - b (sample sd with n - 1).
inline TTestResult paired_t_test(std::span<const double> a, std::span<const double> b, double alpha = 0.05) {
  if (a.size() != b.size()) fail("LengthMismatch", "paired samples differ in length");
  if (a.size() < 2) fail("TooFewSamples", "paired t-test needs at least two pairs");

  const auto n = static_cast<double>(a.size());
  double mean = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) mean += a[i] - b[i];
  mean /= n;
  double ss = 0.0;
  bool all_equal = true;
  const double first = a[0] - b[0];
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    ss += (d - mean) * (d - mean);
    all_equal = all_equal && d == first;
  }
  if (all_equal || ss == 0.0) fail("DegenerateZeroVariance", "all paired differences are equal");

  TTestResult r;
  r.df = static_cast<int>(a.size()) - 1;
  const double sd = std::sqrt(ss / (n - 1.0));
  r.t = mean / (sd / std::sqrt(n));
  const boost::math::students_t dist(r.df);
  r.p_two_sided = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(r.t))));
  r.direction = r.t > 0 ? "a>b" : (r.t < 0 ? "a<b" : "a=b");
  r.significant = r.p_two_sided < alpha;
  return r;
}

}  // namespace transart::metrics
