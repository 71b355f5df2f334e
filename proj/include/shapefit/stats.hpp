#pragma once

#include "shapefit/error.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace shapefit {

//! Sample quantile by linear interpolation of order statistics
//! (Hyndman-Fan type 7). Takes the sample by value and sorts it.
inline double
quantile_type7(std::vector<double> sample, double p)
{
  if (sample.empty())
    throw UsageError("quantile of an empty sample");
  if (!(p >= 0.0 && p <= 1.0))
    throw UsageError("quantile level must lie in [0,1]");
  std::sort(sample.begin(), sample.end());
  const double h = (static_cast<double>(sample.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sample.size() - 1);
  return sample[lo] + (h - static_cast<double>(lo)) * (sample[hi] - sample[lo]);
}

struct Quartiles
{
  double q1;
  double median;
  double q3;

  double iqr() const { return q3 - q1; }
};

inline Quartiles
quartiles(const std::vector<double>& sample)
{
  return { quantile_type7(sample, 0.25), quantile_type7(sample, 0.5),
           quantile_type7(sample, 0.75) };
}

inline double
sample_mean(const std::vector<double>& x)
{
  double s = 0.0;
  for (double v : x)
    s += v;
  return s / static_cast<double>(x.size());
}

//! Unbiased sample variance.
inline double
sample_variance(const std::vector<double>& x)
{
  if (x.size() < 2)
    throw UsageError("variance needs at least two values");
  const double m = sample_mean(x);
  double s = 0.0;
  for (double v : x)
    s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

} // namespace shapefit
