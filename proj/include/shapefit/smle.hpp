#pragma once

#include "shapefit/error.hpp"
#include "shapefit/kernel.hpp"
#include "shapefit/step_distribution.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace shapefit {

namespace detail {

inline void
check_smoothing_args(const StepDistribution& f, double h, double upper)
{
  if (!(h > 0.0))
    throw UsageError("bandwidth must be positive");
  if (!(upper > 0.0))
    throw UsageError("domain upper bound must be positive");
  if (h > upper)
    throw UsageError("bandwidth exceeds the domain length");
  if (!f.empty() && (f.points().front() < 0.0 || f.points().back() > upper))
    throw UsageError("distribution is not supported in the smoothing domain");
}

} // namespace detail

//! Boundary-corrected (reflected) kernel smoother of a step distribution on
//! [0, upper]. Mass missing from a defective distribution is placed at
//! `upper`. Evaluation is exactly 0 at 0 and exactly 1 at `upper`.
class Smoother
{
public:
  Smoother(const StepDistribution& f, double h, double upper)
    : h_(h)
    , upper_(upper)
  {
    detail::check_smoothing_args(f, h, upper);
    for (std::size_t i = 0; i < f.size(); ++i)
      if (f.masses()[i] > 0.0) {
        points_.push_back(f.points()[i]);
        masses_.push_back(f.masses()[i]);
      }
    const double defect = 1.0 - f.total_mass();
    if (defect > 0.0) {
      if (!points_.empty() && points_.back() == upper) {
        masses_.back() += defect;
      } else {
        points_.push_back(upper);
        masses_.push_back(defect);
      }
    }
  }

  double bandwidth() const { return h_; }
  double upper() const { return upper_; }

  double cdf(double t) const
  {
    if (t < 0.0 || t > upper_)
      throw UsageError("evaluation point outside the smoothing domain");
    const double h = h_;
    const double m2 = 2.0 * upper_;
    double value;
    if (t <= 0.5 * upper_) {
      double sum = 0.0;
      for (std::size_t j = 0; j < points_.size(); ++j) {
        const double x = points_[j];
        const double term = (TriweightKernel::integrated((t - x) / h) -
                             TriweightKernel::integrated((-t - x) / h)) +
                            (1.0 - TriweightKernel::integrated((m2 - t - x) / h));
        sum += masses_[j] * term;
      }
      value = sum;
    } else {
      double sum = 0.0;
      for (std::size_t j = 0; j < points_.size(); ++j) {
        const double x = points_[j];
        const double term = ((1.0 - TriweightKernel::integrated((t - x) / h)) -
                             (1.0 - TriweightKernel::integrated((m2 - t - x) / h))) +
                            TriweightKernel::integrated((-t - x) / h);
        sum += masses_[j] * term;
      }
      value = 1.0 - sum;
    }
    return std::clamp(value, 0.0, 1.0);
  }

  //! Derivative of cdf(): the boundary-corrected density estimate.
  double density(double t) const
  {
    const double h = h_;
    const double m2 = 2.0 * upper_;
    double sum = 0.0;
    for (std::size_t j = 0; j < points_.size(); ++j) {
      const double x = points_[j];
      sum += masses_[j] * (kernel_h(t - x, h) + kernel_h(-t - x, h) +
                           kernel_h(m2 - t - x, h));
    }
    return sum;
  }

  double operator()(double t) const { return cdf(t); }

private:
  double h_;
  double upper_;
  std::vector<double> points_;
  std::vector<double> masses_;
};

//! SMLE value int IK_h(t-x) dF(x) with reflection at both domain ends.
inline double
smle_eval(const StepDistribution& f, double h, double t, double upper)
{
  return Smoother(f, h, upper).cdf(t);
}

//! Smoothed cdf evaluated on a grid, with the bandwidth(s) that produced it.
struct SmleCurve
{
  std::vector<double> grid;
  std::vector<double> values;
  std::vector<double> bandwidths; // one entry (global) or one per grid point
  double upper = 0.0;

  bool global_bandwidth() const { return bandwidths.size() == 1; }

  bool monotone() const
  {
    for (std::size_t i = 1; i < values.size(); ++i)
      if (values[i] < values[i - 1])
        return false;
    return true;
  }
};

inline SmleCurve
smle_curve(const StepDistribution& f,
           double h,
           std::span<const double> grid,
           double upper)
{
  Smoother s(f, h, upper);
  SmleCurve curve;
  curve.grid.assign(grid.begin(), grid.end());
  curve.values.reserve(grid.size());
  for (double t : grid)
    curve.values.push_back(s.cdf(t));
  curve.bandwidths = { h };
  curve.upper = upper;
  return curve;
}

//! Curve with a separate bandwidth at each grid point. Such curves need not
//! be monotone.
inline SmleCurve
smle_curve_local(const StepDistribution& f,
                 std::span<const double> bandwidths,
                 std::span<const double> grid,
                 double upper)
{
  if (bandwidths.size() != grid.size())
    throw UsageError("one bandwidth per grid point is required");
  SmleCurve curve;
  curve.grid.assign(grid.begin(), grid.end());
  curve.bandwidths.assign(bandwidths.begin(), bandwidths.end());
  curve.upper = upper;
  for (std::size_t i = 0; i < grid.size(); ++i)
    curve.values.push_back(smle_eval(f, bandwidths[i], grid[i], upper));
  return curve;
}

namespace detail {

// 5-point Gauss-Legendre nodes and weights on [-1,1].
inline constexpr double gl5_nodes[5] = { -0.9061798459386640, -0.5384693101056831,
                                         0.0, 0.5384693101056831,
                                         0.9061798459386640 };
inline constexpr double gl5_weights[5] = { 0.2369268850561891, 0.4786286704993665,
                                           0.5688888888888889, 0.4786286704993665,
                                           0.2369268850561891 };

} // namespace detail

//! Applies the bandwidth-h smoothing functional to the smooth distribution
//! `pilot` (itself a smoothed step distribution): int IK_h(t-x) dpilot(x),
//! boundary corrected like cdf().
inline double
smooth_of_smooth(const Smoother& pilot, double h, double t, int panels = 400)
{
  const double upper = pilot.upper();
  if (!(h > 0.0) || h > upper)
    throw UsageError("bandwidth must lie in (0, domain length]");
  if (t < 0.0 || t > upper)
    throw UsageError("evaluation point outside the smoothing domain");
  const double m2 = 2.0 * upper;
  auto weight = [&](double x) {
    return (TriweightKernel::integrated((t - x) / h) -
            TriweightKernel::integrated((-t - x) / h)) +
           (1.0 - TriweightKernel::integrated((m2 - t - x) / h));
  };
  // weight(x) == 1 for x < t - h
  const double a = std::max(0.0, t - h);
  double total = a > 0.0 ? pilot.cdf(a) : 0.0;
  const double width = (upper - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * width;
    const double mid = lo + 0.5 * width;
    for (int q = 0; q < 5; ++q) {
      const double x = mid + 0.5 * width * detail::gl5_nodes[q];
      total += 0.5 * width * detail::gl5_weights[q] * weight(x) * pilot.density(x);
    }
  }
  return total;
}

} // namespace shapefit
