#pragma once

#include "shapefit/error.hpp"

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

namespace shapefit {

//! Discrete (sub-)distribution: sorted jump locations with nonnegative
//! masses summing to at most one. The cdf is right-continuous.
class StepDistribution
{
public:
  StepDistribution() = default;

  StepDistribution(std::vector<double> points, std::vector<double> masses)
    : points_(std::move(points))
    , masses_(std::move(masses))
  {
    if (points_.size() != masses_.size())
      throw UsageError("step distribution: points and masses differ in length");
    double total = 0.0;
    for (std::size_t i = 0; i < points_.size(); ++i) {
      if (i > 0 && !(points_[i] > points_[i - 1]))
        throw UsageError("step distribution: points must be strictly increasing");
      if (!(masses_[i] >= 0.0))
        throw UsageError("step distribution: negative mass");
      total += masses_[i];
    }
    if (total > 1.0 + 1e-12)
      throw UsageError("step distribution: total mass exceeds one");
    cumulative_.resize(masses_.size());
    std::partial_sum(masses_.begin(), masses_.end(), cumulative_.begin());
  }

  //! Builds the distribution from nondecreasing cdf values at `points`.
  static StepDistribution from_cdf(std::vector<double> points,
                                   std::span<const double> cdf)
  {
    std::vector<double> masses(cdf.size());
    double prev = 0.0;
    for (std::size_t i = 0; i < cdf.size(); ++i) {
      masses[i] = std::max(0.0, cdf[i] - prev);
      prev = std::max(prev, cdf[i]);
    }
    return StepDistribution(std::move(points), std::move(masses));
  }

  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const std::vector<double>& points() const { return points_; }
  const std::vector<double>& masses() const { return masses_; }

  double total_mass() const
  {
    return cumulative_.empty() ? 0.0 : cumulative_.back();
  }

  double cdf(double x) const
  {
    auto it = std::upper_bound(points_.begin(), points_.end(), x);
    if (it == points_.begin())
      return 0.0;
    return cumulative_[static_cast<std::size_t>(it - points_.begin()) - 1];
  }

  //! cdf value at the i-th support point.
  double cdf_at(std::size_t i) const { return cumulative_[i]; }

  //! Same distribution with zero-mass points removed.
  StepDistribution compacted() const
  {
    std::vector<double> p;
    std::vector<double> m;
    for (std::size_t i = 0; i < size(); ++i)
      if (masses_[i] > 0.0) {
        p.push_back(points_[i]);
        m.push_back(masses_[i]);
      }
    return StepDistribution(std::move(p), std::move(m));
  }

  //! Moves every mass located above `upper` onto `upper`.
  StepDistribution truncated_to(double upper) const
  {
    std::vector<double> p;
    std::vector<double> m;
    double moved = 0.0;
    for (std::size_t i = 0; i < size(); ++i) {
      if (points_[i] < upper) {
        p.push_back(points_[i]);
        m.push_back(masses_[i]);
      } else {
        moved += masses_[i];
      }
    }
    if (moved > 0.0) {
      p.push_back(upper);
      m.push_back(moved);
    }
    return StepDistribution(std::move(p), std::move(m));
  }

private:
  std::vector<double> points_;
  std::vector<double> masses_;
  std::vector<double> cumulative_;
};

} // namespace shapefit
