#pragma once

#include "shapefit/bootstrap.hpp"
#include "shapefit/current_status.hpp"
#include "shapefit/error.hpp"
#include "shapefit/generators.hpp"
#include "shapefit/incubation.hpp"
#include "shapefit/kernel.hpp"
#include "shapefit/laws.hpp"
#include "shapefit/log.hpp"
#include "shapefit/parallel.hpp"
#include "shapefit/rng.hpp"
#include "shapefit/smle.hpp"
#include "shapefit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace shapefit {

enum class BandMethod
{
  studentized,
  percentile
};

inline std::string
to_string(BandMethod m)
{
  return m == BandMethod::studentized ? "studentized" : "percentile";
}

struct ConfidenceBand
{
  std::vector<double> grid;
  std::vector<double> lower;
  std::vector<double> estimate;
  std::vector<double> upper;
  double alpha = 0.05;
  BandMethod method = BandMethod::studentized;
  int B = 0;
  double h = 0.0;
  double h0 = 0.0;
  std::size_t skipped = 0; // (point, replicate) pairs left out

  bool contains(std::size_t k, double value) const
  {
    return lower[k] <= value && value <= upper[k];
  }
};

namespace detail {

inline void
check_band_args(std::span<const double> grid, double h, double h0, int B, double alpha,
                double domain)
{
  if (!(h > 0.0) || !(h0 > 0.0))
    throw UsageError("bandwidths must be positive");
  if (h > domain || h0 > domain)
    throw UsageError("bandwidths must not exceed the domain length");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw UsageError("alpha must lie in (0,1)");
  if (B < 100)
    throw UsageError("at least 100 bootstrap replications are required");
  if (grid.empty())
    throw UsageError("empty grid");
  for (double t : grid)
    if (!(t >= 0.0 && t <= domain))
      throw UsageError("grid points must lie in the domain");
}

// Squared kernel weights K_h(t - T_i)^2 / n^2 of the records near t.
struct KernelWeights
{
  std::vector<std::size_t> index;
  std::vector<double> weight;
};

inline std::vector<KernelWeights>
kernel_weights(std::span<const double> grid, const std::vector<double>& times, double h)
{
  const double n2 = static_cast<double>(times.size()) * static_cast<double>(times.size());
  std::vector<KernelWeights> out(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k)
    for (std::size_t i = 0; i < times.size(); ++i) {
      const double kv = kernel_h(grid[k] - times[i], h);
      if (kv > 0.0) {
        out[k].index.push_back(i);
        out[k].weight.push_back(kv * kv / n2);
      }
    }
  return out;
}

// n^-2 sum_i K_h(t - T_i)^2 (delta_i - F(T_i))^2
inline double
studentizer(const KernelWeights& kw,
            const std::vector<double>& delta,
            const std::vector<double>& fitted)
{
  double s = 0.0;
  for (std::size_t a = 0; a < kw.index.size(); ++a) {
    const std::size_t i = kw.index[a];
    const double r = delta[i] - fitted[i];
    s += kw.weight[a] * r * r;
  }
  return s;
}

} // namespace detail

//! Studentized smoothed-bootstrap band for the SMLE of current status data.
//! Bootstrap indicators are drawn from the pilot SMLE (bandwidth h0) with
//! the observation times fixed; the pivot is centred at the bandwidth-h
//! smoothing of the pilot and scaled by the plug-in variance proxy.
inline ConfidenceBand
cs_ci_studentized(const CurrentStatusData& data,
                  std::span<const double> grid,
                  double h,
                  double h0,
                  int B,
                  double alpha,
                  std::uint64_t seed,
                  double domain = 2.0)
{
  detail::check_band_args(grid, h, h0, B, alpha, domain);
  const StepDistribution mle = cs_mle(data);
  const Smoother smle(mle, h, domain);
  const Smoother pilot(mle, h0, domain);
  const CurrentStatusBootstrap boot(data, pilot);
  const auto& times = boot.times();
  const auto& slot = boot.pooled().record_slot;
  const std::size_t n = data.size();
  const std::size_t nt = grid.size();
  const auto weights = detail::kernel_weights(grid, times, h);

  std::vector<double> centre(nt), estimate(nt), s_orig(nt);
  {
    std::vector<double> delta(n), fitted(n);
    for (std::size_t i = 0; i < n; ++i) {
      delta[i] = data.records[i].delta;
      fitted[i] = mle.cdf(times[i]);
    }
    for (std::size_t k = 0; k < nt; ++k) {
      centre[k] = smooth_of_smooth(pilot, h, grid[k]);
      estimate[k] = smle.cdf(grid[k]);
      s_orig[k] = detail::studentizer(weights[k], delta, fitted);
    }
  }

  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::vector<double>> pivots(static_cast<std::size_t>(B));
  parallel_for(static_cast<std::size_t>(B), [&](std::size_t b) {
    CounterRng rng(seed, b, "cs-band");
    std::vector<double> delta, positives;
    boot.resample(rng, delta, positives);
    const std::vector<double> values = boot.mle_values(positives);
    std::vector<double> fitted(n);
    for (std::size_t i = 0; i < n; ++i)
      fitted[i] = values[slot[i]];
    const Smoother star(StepDistribution::from_cdf(boot.pooled().times, values), h, domain);
    auto& w = pivots[b];
    w.resize(nt);
    for (std::size_t k = 0; k < nt; ++k) {
      const double s = detail::studentizer(weights[k], delta, fitted);
      w[k] = s > 0.0 ? (star.cdf(grid[k]) - centre[k]) / std::sqrt(s) : nan;
    }
  });

  ConfidenceBand band;
  band.grid.assign(grid.begin(), grid.end());
  band.estimate = estimate;
  band.alpha = alpha;
  band.method = BandMethod::studentized;
  band.B = B;
  band.h = h;
  band.h0 = h0;
  band.lower.resize(nt);
  band.upper.resize(nt);
  for (std::size_t k = 0; k < nt; ++k) {
    std::vector<double> sample;
    sample.reserve(static_cast<std::size_t>(B));
    for (const auto& w : pivots)
      if (std::isnan(w[k]))
        ++band.skipped;
      else
        sample.push_back(w[k]);
    if (sample.size() < 2)
      throw NumericalError("bootstrap variance vanishes at t=" + std::to_string(grid[k]));
    const double root = std::sqrt(s_orig[k]);
    const double qlo = quantile_type7(sample, 0.5 * alpha);
    const double qhi = quantile_type7(std::move(sample), 1.0 - 0.5 * alpha);
    band.lower[k] = std::clamp(estimate[k] - qhi * root, 0.0, 1.0);
    band.upper[k] = std::clamp(estimate[k] - qlo * root, 0.0, 1.0);
  }
  const double total = static_cast<double>(B) * static_cast<double>(nt);
  if (band.skipped > 0)
    log::info("skipped ", band.skipped, " bootstrap pivots with zero variance");
  if (static_cast<double>(band.skipped) > 0.01 * total)
    throw NumericalError("more than 1% of bootstrap pivots have zero variance (" +
                         std::to_string(band.skipped) + " of " +
                         std::to_string(static_cast<long long>(total)) + ")");
  return band;
}

//! Percentile smoothed-bootstrap band for the incubation SMLE. Bootstrap
//! samples redraw the cell of each observation from the pilot SMLE; the
//! band is estimate minus the upper and lower bootstrap deviation quantiles.
inline ConfidenceBand
incubation_ci(const IncubationData& data,
              std::span<const double> grid,
              double h,
              double h0,
              int B,
              double alpha,
              std::uint64_t seed,
              double domain = 20.0,
              const IcmOptions& icm = {})
{
  detail::check_band_args(grid, h, h0, B, alpha, domain);
  const StepDistribution mle = inc_mle(data, icm).truncated_to(domain);
  const Smoother smle(mle, h, domain);
  const Smoother pilot(mle, h0, domain);
  const IncubationBootstrap boot(data, pilot);
  const std::size_t nt = grid.size();

  std::vector<double> centre(nt), estimate(nt);
  for (std::size_t k = 0; k < nt; ++k) {
    centre[k] = smooth_of_smooth(pilot, h, grid[k]);
    estimate[k] = smle.cdf(grid[k]);
  }

  std::vector<std::vector<double>> dev(static_cast<std::size_t>(B));
  parallel_for(static_cast<std::size_t>(B), [&](std::size_t b) {
    CounterRng rng(seed, b, "incubation-band");
    const StepDistribution fstar = inc_mle(boot.resample(rng), icm).truncated_to(domain);
    const Smoother star(fstar, h, domain);
    auto& d = dev[b];
    d.resize(nt);
    for (std::size_t k = 0; k < nt; ++k)
      d[k] = star.cdf(grid[k]) - centre[k];
  });

  ConfidenceBand band;
  band.grid.assign(grid.begin(), grid.end());
  band.estimate = estimate;
  band.alpha = alpha;
  band.method = BandMethod::percentile;
  band.B = B;
  band.h = h;
  band.h0 = h0;
  band.lower.resize(nt);
  band.upper.resize(nt);
  std::vector<double> sample(static_cast<std::size_t>(B));
  for (std::size_t k = 0; k < nt; ++k) {
    for (std::size_t b = 0; b < dev.size(); ++b)
      sample[b] = dev[b][k];
    const double plo = quantile_type7(sample, 0.5 * alpha);
    const double phi = quantile_type7(sample, 1.0 - 0.5 * alpha);
    band.lower[k] = std::clamp(estimate[k] - phi, 0.0, 1.0);
    band.upper[k] = std::clamp(estimate[k] - plo, 0.0, 1.0);
  }
  return band;
}

// --------------------------------------------------------------------------
// Coverage experiment

struct CoverageConfig
{
  TruthSpec truth = TruthSpec::truncated_exponential(2.0);
  ObservationLaw observation{ 0.0, 2.0 };
  std::size_t n = 500;
  int replications = 1000;
  std::vector<double> grid;
  double h_constant = 1.5;  // h = h_constant * n^{-1/5}
  double h0_constant = 2.0; // h0 = h0_constant * n^{-1/9}
  int B = 500;
  double alpha = 0.05;
  std::uint64_t seed = 1;
  double domain = 2.0;

  double h() const { return h_constant * std::pow(static_cast<double>(n), -0.2); }
  double h0() const { return h0_constant * std::pow(static_cast<double>(n), -1.0 / 9.0); }
};

struct CoverageResult
{
  std::vector<double> grid;
  std::vector<double> noncoverage; // proportion over successful replications
  int replications = 0;
  int failures = 0;

  //! Mean non-coverage over grid points in [lo, hi].
  double mean_over(double lo, double hi) const
  {
    double s = 0.0;
    int count = 0;
    for (std::size_t k = 0; k < grid.size(); ++k)
      if (grid[k] >= lo && grid[k] <= hi) {
        s += noncoverage[k];
        ++count;
      }
    return count ? s / count : std::numeric_limits<double>::quiet_NaN();
  }
};

using BandBuilder =
  std::function<ConfidenceBand(const CurrentStatusData&, const CoverageConfig&, int)>;

//! Seed of the bootstrap run inside replication r.
inline std::uint64_t
replication_seed(std::uint64_t seed, std::uint64_t r, std::string_view purpose)
{
  CounterRng rng(seed, r, purpose);
  return rng();
}

//! Non-coverage of F0 by bands built from simulated current status samples.
//! `builder` defaults to the Studentized smoothed bootstrap band.
inline CoverageResult
coverage_experiment(const CoverageConfig& config, const BandBuilder& builder = {})
{
  if (config.replications < 1)
    throw UsageError("at least one replication is required");
  if (config.grid.empty())
    throw UsageError("empty grid");
  const BandBuilder build = builder ? builder : [](const CurrentStatusData& data,
                                                   const CoverageConfig& c, int r) {
    return cs_ci_studentized(data, c.grid, c.h(), c.h0(), c.B, c.alpha,
                             replication_seed(c.seed, static_cast<std::uint64_t>(r), "coverage"),
                             c.domain);
  };
  CoverageResult res;
  res.grid = config.grid;
  res.replications = config.replications;
  std::vector<double> misses(config.grid.size(), 0.0);
  int ok = 0;
  for (int r = 0; r < config.replications; ++r) {
    const auto data = gen_current_status(config.n, config.truth, config.observation,
                                         config.seed, static_cast<std::uint64_t>(r));
    ConfidenceBand band;
    try {
      band = build(data, config, r);
    } catch (const NumericalError& e) {
      log::warn("coverage replication ", r, " failed: ", e.what());
      ++res.failures;
      continue;
    }
    ++ok;
    for (std::size_t k = 0; k < config.grid.size(); ++k)
      if (!band.contains(k, config.truth.cdf(config.grid[k])))
        misses[k] += 1.0;
  }
  res.noncoverage.resize(misses.size());
  for (std::size_t k = 0; k < misses.size(); ++k)
    res.noncoverage[k] = ok ? misses[k] / ok : std::numeric_limits<double>::quiet_NaN();
  return res;
}

} // namespace shapefit
