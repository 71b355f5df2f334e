#pragma once

#include "shapefit/current_status.hpp"
#include "shapefit/error.hpp"
#include "shapefit/incubation.hpp"
#include "shapefit/log.hpp"
#include "shapefit/rng.hpp"
#include "shapefit/smle.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

namespace shapefit {

//! Smoothed bootstrap for current status data: observation times stay fixed
//! and each indicator is redrawn as Bernoulli(pilot(T_i)).
class CurrentStatusBootstrap
{
public:
  CurrentStatusBootstrap(const CurrentStatusData& data, const Smoother& pilot)
  {
    if (data.records.empty())
      throw UsageError("empty data");
    times_.reserve(data.size());
    for (const auto& r : data.records)
      times_.push_back(r.t);
    pooled_ = pool_times(times_);
    prob_.reserve(data.size());
    for (double t : times_)
      prob_.push_back(t >= pilot.upper() ? 1.0 : pilot.cdf(std::max(0.0, t)));
  }

  const PooledTimes& pooled() const { return pooled_; }
  const std::vector<double>& times() const { return times_; }
  const std::vector<double>& probabilities() const { return prob_; }

  //! Draws indicators into `delta` and per-slot positive counts into
  //! `positives`.
  void resample(CounterRng& rng, std::vector<double>& delta, std::vector<double>& positives) const
  {
    delta.resize(times_.size());
    positives.assign(pooled_.times.size(), 0.0);
    for (std::size_t i = 0; i < times_.size(); ++i) {
      delta[i] = rng.bernoulli(prob_[i]) ? 1.0 : 0.0;
      positives[pooled_.record_slot[i]] += delta[i];
    }
  }

  //! MLE cdf values at the pooled times for the given positive counts.
  std::vector<double> mle_values(const std::vector<double>& positives) const
  {
    return cs_mle_values(pooled_, positives);
  }

  StepDistribution mle(const std::vector<double>& positives) const
  {
    return StepDistribution::from_cdf(pooled_.times, mle_values(positives));
  }

private:
  std::vector<double> times_;
  PooledTimes pooled_;
  std::vector<double> prob_;
};

//! Smoothed bootstrap for incubation data: exposure lengths and offsets T_i
//! stay fixed and the cell index is redrawn from the multinomial law with
//! cell probabilities pilot(T_i + jE_i) - pilot(T_i + (j-1)E_i).
class IncubationBootstrap
{
public:
  IncubationBootstrap(const IncubationData& data, const Smoother& pilot)
    : view_(reduce_to_interval_censoring(data))
  {
    const double upper = pilot.upper();
    auto F = [&](double x) {
      if (x <= 0.0)
        return 0.0;
      if (x >= upper)
        return 1.0;
      return pilot.cdf(x);
    };
    cumulative_.resize(view_.records.size());
    for (std::size_t i = 0; i < view_.records.size(); ++i) {
      const auto& r = view_.records[i];
      // cells j = 0..m with m the first j such that T + jE reaches upper
      const auto m = static_cast<long>(std::ceil((upper - r.t) / r.e));
      std::vector<double>& cum = cumulative_[i];
      cum.reserve(static_cast<std::size_t>(m) + 1);
      double prev = 0.0, total = 0.0;
      bool clamped = false;
      for (long j = 0; j <= m; ++j) {
        const double cur = F(r.boundary(j));
        double p = cur - prev;
        if (p < 0.0) {
          clamped = true;
          p = 0.0;
        }
        prev = cur;
        total += p;
        cum.push_back(total);
      }
      if (clamped)
        ++clamped_records_;
      if (!(total > 0.0))
        throw NumericalError("bootstrap cell probabilities vanish for record " +
                             std::to_string(i + 1));
      if (std::abs(total - 1.0) > 1e-8)
        ++renormalized_records_;
      for (double& c : cum)
        c /= total;
    }
    if (clamped_records_ > 0)
      log::warn("negative cell probabilities clamped to 0 for ", clamped_records_,
                " records");
  }

  std::size_t clamped_records() const { return clamped_records_; }
  std::size_t renormalized_records() const { return renormalized_records_; }
  const IntervalCensoredView& view() const { return view_; }

  //! Cell probabilities (after renormalization) of record i.
  std::vector<double> cell_probabilities(std::size_t i) const
  {
    std::vector<double> p(cumulative_[i].size());
    double prev = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) {
      p[j] = cumulative_[i][j] - prev;
      prev = cumulative_[i][j];
    }
    return p;
  }

  IncubationData resample(CounterRng& rng) const
  {
    IncubationData out;
    out.records.reserve(view_.records.size());
    for (std::size_t i = 0; i < view_.records.size(); ++i) {
      const auto& r = view_.records[i];
      const auto& cum = cumulative_[i];
      const double u = rng.uniform();
      auto it = std::upper_bound(cum.begin(), cum.end(), u);
      auto j = static_cast<long>(it - cum.begin());
      j = std::min<long>(j, static_cast<long>(cum.size()) - 1);
      // skip empty cells (possible only through rounding at u ~ 1)
      while (j > 0 && cum[static_cast<std::size_t>(j)] == cum[static_cast<std::size_t>(j - 1)])
        --j;
      double s = r.boundary(j);
      if (!(s > 0.0))
        s = r.boundary(j + 1);
      out.records.push_back({ r.e, s });
    }
    return out;
  }

private:
  IntervalCensoredView view_;
  std::vector<std::vector<double>> cumulative_;
  std::size_t clamped_records_ = 0;
  std::size_t renormalized_records_ = 0;
};

} // namespace shapefit
