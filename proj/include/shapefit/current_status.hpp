#pragma once

#include "shapefit/error.hpp"
#include "shapefit/gcm.hpp"
#include "shapefit/step_distribution.hpp"

#include <algorithm>
#include <cmath>
#include <concepts>
#include <limits>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

namespace shapefit {

struct CurrentStatusRecord
{
  double t;
  int delta;
};

struct CurrentStatusData
{
  std::vector<CurrentStatusRecord> records;

  std::size_t size() const { return records.size(); }

  void validate() const
  {
    for (std::size_t i = 0; i < records.size(); ++i) {
      const auto& r = records[i];
      if (!std::isfinite(r.t) || !(r.t > 0.0))
        throw DataError("record " + std::to_string(i + 1) +
                        ": observation time must be finite and positive");
      if (r.delta != 0 && r.delta != 1)
        throw DataError("record " + std::to_string(i + 1) +
                        ": indicator must be 0 or 1");
    }
  }
};

//! Distinct sorted observation times with tie counts. Tied records are
//! merged into one cusum point, which leaves the likelihood unchanged.
struct PooledTimes
{
  std::vector<double> times;
  std::vector<double> counts;
  std::vector<std::size_t> record_slot; // record index -> slot in `times`
};

inline PooledTimes
pool_times(std::span<const double> t)
{
  std::vector<std::size_t> order(t.size());
  std::iota(order.begin(), order.end(), std::size_t{ 0 });
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return t[a] < t[b]; });
  PooledTimes pooled;
  pooled.record_slot.resize(t.size());
  for (std::size_t idx : order) {
    if (pooled.times.empty() || t[idx] != pooled.times.back()) {
      pooled.times.push_back(t[idx]);
      pooled.counts.push_back(0.0);
    }
    pooled.counts.back() += 1.0;
    pooled.record_slot[idx] = pooled.times.size() - 1;
  }
  return pooled;
}

//! MLE values at the pooled times given per-slot counts of delta == 1.
inline std::vector<double>
cs_mle_values(const PooledTimes& pooled, std::span<const double> positives)
{
  const std::size_t m = pooled.times.size();
  if (m == 0)
    throw UsageError("empty data");
  std::vector<double> x(m);
  std::vector<double> y(m);
  double cx = 0.0;
  double cy = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    cx += pooled.counts[j];
    cy += positives[j];
    x[j] = cx;
    y[j] = cy;
  }
  auto slopes = gcm_slopes(x, y);
  for (double& s : slopes)
    s = std::clamp(s, 0.0, 1.0);
  return slopes;
}

//! Nonparametric MLE of the event-time distribution from current status
//! data: left-continuous slopes of the convex minorant of the cusum diagram.
inline StepDistribution
cs_mle(const CurrentStatusData& data)
{
  if (data.records.empty())
    throw UsageError("empty data");
  data.validate();
  std::vector<double> t;
  t.reserve(data.size());
  for (const auto& r : data.records)
    t.push_back(r.t);
  const PooledTimes pooled = pool_times(t);
  std::vector<double> positives(pooled.times.size(), 0.0);
  for (std::size_t i = 0; i < data.size(); ++i)
    positives[pooled.record_slot[i]] += data.records[i].delta;
  auto values = cs_mle_values(pooled, positives);
  return StepDistribution::from_cdf(pooled.times, values);
}

//! Current status log likelihood sum delta log F(t) + (1-delta) log(1-F(t)),
//! with 0 log 0 = 0.
template<typename Cdf>
  requires std::invocable<Cdf, double>
double
cs_loglik(const CurrentStatusData& data, Cdf&& cdf)
{
  double ll = 0.0;
  for (const auto& r : data.records) {
    const double p = cdf(r.t);
    if (r.delta == 1)
      ll += p > 0.0 ? std::log(p) : -std::numeric_limits<double>::infinity();
    else
      ll += p < 1.0 ? std::log1p(-p) : -std::numeric_limits<double>::infinity();
  }
  return ll;
}

inline double
cs_loglik(const CurrentStatusData& data, const StepDistribution& f)
{
  return cs_loglik(data, [&](double t) { return f.cdf(t); });
}

} // namespace shapefit
