#pragma once

#include "shapefit/error.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace shapefit {

//! Cusum diagram with the origin (0,0) as implicit first vertex.
//!
//! `x` holds strictly increasing abscissas (x[0] > 0), `y` the matching
//! ordinates. Tied abscissas must be merged by the caller.
struct CusumDiagram
{
  std::vector<double> x;
  std::vector<double> y;
};

using SlopeVector = std::vector<double>;

namespace detail {

inline void
check_diagram(std::span<const double> x, std::span<const double> y)
{
  if (x.empty() || y.empty())
    throw UsageError("empty diagram");
  if (x.size() != y.size())
    throw UsageError("diagram: x and y differ in length");
  double prev = 0.0;
  for (double xi : x) {
    if (!(xi > prev))
      throw UsageError("abscissa order");
    prev = xi;
  }
}

} // namespace detail

//! Left-continuous slopes of the greatest convex minorant at each x[i].
//!
//! Builds the lower convex hull of {(0,0), (x_i, y_i)} with a single stack
//! pass, then reads off the slope of the hull segment ending at or passing
//! over each abscissa.
inline SlopeVector
gcm_slopes(std::span<const double> x, std::span<const double> y)
{
  detail::check_diagram(x, y);
  const std::size_t n = x.size();

  // hull holds indices into the extended point list; 0 is the origin,
  // k >= 1 refers to (x[k-1], y[k-1]).
  auto px = [&](std::size_t k) { return k == 0 ? 0.0 : x[k - 1]; };
  auto py = [&](std::size_t k) { return k == 0 ? 0.0 : y[k - 1]; };

  std::vector<std::size_t> hull;
  hull.reserve(n + 1);
  hull.push_back(0);
  for (std::size_t k = 1; k <= n; ++k) {
    while (hull.size() >= 2) {
      const std::size_t a = hull[hull.size() - 2];
      const std::size_t b = hull.back();
      // pop b if it does not lie strictly below the chord a -> k
      const double lhs = (py(b) - py(a)) * (px(k) - px(a));
      const double rhs = (py(k) - py(a)) * (px(b) - px(a));
      if (lhs >= rhs)
        hull.pop_back();
      else
        break;
    }
    hull.push_back(k);
  }

  SlopeVector slopes(n);
  for (std::size_t h = 1; h < hull.size(); ++h) {
    const std::size_t a = hull[h - 1];
    const std::size_t b = hull[h];
    const double s = (py(b) - py(a)) / (px(b) - px(a));
    for (std::size_t k = a + 1; k <= b; ++k)
      slopes[k - 1] = s;
  }
  return slopes;
}

inline SlopeVector
gcm_slopes(const CusumDiagram& diagram)
{
  return gcm_slopes(diagram.x, diagram.y);
}

//! Weighted least-squares nondecreasing fit (pool adjacent violators).
inline std::vector<double>
pava_weighted(std::span<const double> values, std::span<const double> weights)
{
  if (values.size() != weights.size())
    throw UsageError("pava: values and weights differ in length");
  const std::size_t n = values.size();
  for (double w : weights)
    if (!(w > 0.0))
      throw UsageError("pava: weights must be positive");

  std::vector<double> level;
  std::vector<double> weight;
  std::vector<std::size_t> count;
  level.reserve(n);
  weight.reserve(n);
  count.reserve(n);

  for (std::size_t i = 0; i < n; ++i) {
    double v = values[i];
    double w = weights[i];
    std::size_t c = 1;
    while (!level.empty() && level.back() >= v) {
      const double wsum = weight.back() + w;
      v = (level.back() * weight.back() + v * w) / wsum;
      w = wsum;
      c += count.back();
      level.pop_back();
      weight.pop_back();
      count.pop_back();
    }
    level.push_back(v);
    weight.push_back(w);
    count.push_back(c);
  }

  std::vector<double> fit;
  fit.reserve(n);
  for (std::size_t b = 0; b < level.size(); ++b)
    fit.insert(fit.end(), count[b], level[b]);
  return fit;
}

} // namespace shapefit
