#pragma once

#include "shapefit/bootstrap.hpp"
#include "shapefit/current_status.hpp"
#include "shapefit/error.hpp"
#include "shapefit/incubation.hpp"
#include "shapefit/kernel.hpp"
#include "shapefit/log.hpp"
#include "shapefit/parallel.hpp"
#include "shapefit/rng.hpp"
#include "shapefit/smle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace shapefit {

//! Smoothed-bootstrap bandwidth search. Candidates are c * n^{-1/5} over
//! `c_grid`; the bootstrap samples are generated from the SMLE with pilot
//! bandwidth c0 * n^{-1/9}.
struct BandwidthPlan
{
  double c0 = 2.0;
  std::vector<double> c_grid = default_grid(1.0);
  int B = 500;
  std::uint64_t seed = 1;
  std::vector<double> targets;
  double domain = 2.0; // smoothing domain [0, domain]

  static std::vector<double> default_grid(double scale)
  {
    std::vector<double> g;
    for (int k = 2; k <= 16; ++k)
      g.push_back(scale * 0.25 * k);
    return g;
  }

  static BandwidthPlan current_status(double domain = 2.0)
  {
    BandwidthPlan p;
    p.domain = domain;
    return p;
  }

  //! Incubation times live on [0, 20]; constants are scaled by 10 so that
  //! the pilot is h0 = 10 n^{-1/9} (about 5 at n = 500).
  static BandwidthPlan incubation(double domain = 20.0)
  {
    BandwidthPlan p;
    p.c0 = 10.0;
    p.c_grid = default_grid(10.0);
    p.domain = domain;
    return p;
  }

  double pilot_bandwidth(std::size_t n) const
  {
    return c0 * std::pow(static_cast<double>(n), -1.0 / 9.0);
  }

  double candidate_bandwidth(double c, std::size_t n) const
  {
    return c * std::pow(static_cast<double>(n), -0.2);
  }

  void validate() const
  {
    if (!(c0 > 0.0))
      throw UsageError("pilot constant must be positive");
    if (c_grid.empty())
      throw UsageError("empty candidate grid");
    for (double c : c_grid)
      if (!(c > 0.0))
        throw UsageError("candidate constants must be positive");
    if (B < 1)
      throw UsageError("bootstrap replication count must be at least 1");
    if (!(domain > 0.0))
      throw UsageError("domain must be positive");
  }
};

//! Monte-Carlo criterion values, indexed [candidate][target].
struct BandwidthCriterion
{
  std::vector<double> constants;
  std::vector<double> bandwidths;
  std::vector<double> targets;
  std::vector<std::vector<double>> values;

  //! Index of the best candidate for one target (first on ties).
  std::size_t argmin_local(std::size_t target) const
  {
    std::size_t best = 0;
    for (std::size_t c = 1; c < values.size(); ++c)
      if (values[c][target] < values[best][target])
        best = c;
    return best;
  }

  //! Index of the best candidate for the summed criterion.
  std::size_t argmin_global() const
  {
    std::size_t best = 0;
    double best_value = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < values.size(); ++c) {
      double s = 0.0;
      for (double v : values[c])
        s += v;
      if (s < best_value) {
        best_value = s;
        best = c;
      }
    }
    return best;
  }
};

namespace detail {

inline void
check_targets(std::span<const double> targets, double domain)
{
  if (targets.empty())
    throw UsageError("empty target grid");
  for (double t : targets)
    if (!(t > 0.0 && t < domain))
      throw UsageError("bandwidth targets must be interior to the domain");
}

inline std::vector<double>
candidate_bandwidths(const BandwidthPlan& plan, std::size_t n)
{
  std::vector<double> h;
  for (double c : plan.c_grid) {
    double b = plan.candidate_bandwidth(c, n);
    if (b > plan.domain) {
      log::warn("candidate bandwidth ", b, " capped at the domain length");
      b = plan.domain;
    }
    h.push_back(b);
  }
  return h;
}

// Runs B replicates, each producing a bootstrap step distribution, and sums
// squared deviations from the pilot values in replicate order.
template<typename Replicate>
BandwidthCriterion
bootstrap_criterion(const BandwidthPlan& plan,
                    std::size_t n,
                    std::span<const double> targets,
                    const std::vector<double>& centre,
                    Replicate&& replicate)
{
  BandwidthCriterion crit;
  crit.constants = plan.c_grid;
  crit.bandwidths = candidate_bandwidths(plan, n);
  crit.targets.assign(targets.begin(), targets.end());
  const std::size_t nc = crit.bandwidths.size();
  const std::size_t nt = targets.size();
  std::vector<std::vector<double>> per_rep(static_cast<std::size_t>(plan.B));
  parallel_for(static_cast<std::size_t>(plan.B), [&](std::size_t b) {
    CounterRng rng(plan.seed, b, "bandwidth");
    const StepDistribution fstar = replicate(rng);
    std::vector<double>& out = per_rep[b];
    out.resize(nc * nt);
    for (std::size_t c = 0; c < nc; ++c) {
      const Smoother s(fstar, crit.bandwidths[c], plan.domain);
      for (std::size_t k = 0; k < nt; ++k) {
        const double d = s.cdf(targets[k]) - centre[k];
        out[c * nt + k] = d * d;
      }
    }
  });
  crit.values.assign(nc, std::vector<double>(nt, 0.0));
  for (const auto& rep : per_rep)
    for (std::size_t c = 0; c < nc; ++c)
      for (std::size_t k = 0; k < nt; ++k)
        crit.values[c][k] += rep[c * nt + k];
  for (auto& row : crit.values)
    for (double& v : row)
      v /= static_cast<double>(plan.B);
  return crit;
}

} // namespace detail

//! Bootstrap mean squared deviation of the SMLE from the pilot SMLE for
//! every candidate and target, current status version.
inline BandwidthCriterion
bandwidth_criterion(const CurrentStatusData& data,
                    std::span<const double> targets,
                    const BandwidthPlan& plan)
{
  plan.validate();
  detail::check_targets(targets, plan.domain);
  const StepDistribution mle = cs_mle(data);
  const std::size_t n = data.size();
  const Smoother pilot(mle, std::min(plan.pilot_bandwidth(n), plan.domain), plan.domain);
  std::vector<double> centre;
  for (double t : targets)
    centre.push_back(pilot.cdf(t));
  const CurrentStatusBootstrap boot(data, pilot);
  return detail::bootstrap_criterion(plan, n, targets, centre, [&](CounterRng& rng) {
    std::vector<double> delta, positives;
    boot.resample(rng, delta, positives);
    return boot.mle(positives);
  });
}

//! Incubation version; bootstrap samples are multinomial cell draws and the
//! MLE is computed by the ICM algorithm.
inline BandwidthCriterion
bandwidth_criterion(const IncubationData& data,
                    std::span<const double> targets,
                    const BandwidthPlan& plan,
                    const IcmOptions& icm = {})
{
  plan.validate();
  detail::check_targets(targets, plan.domain);
  const StepDistribution mle = inc_mle(data, icm).truncated_to(plan.domain);
  const std::size_t n = data.size();
  const Smoother pilot(mle, std::min(plan.pilot_bandwidth(n), plan.domain), plan.domain);
  std::vector<double> centre;
  for (double t : targets)
    centre.push_back(pilot.cdf(t));
  const IncubationBootstrap boot(data, pilot);
  return detail::bootstrap_criterion(plan, n, targets, centre, [&](CounterRng& rng) {
    return inc_mle(boot.resample(rng), icm).truncated_to(plan.domain);
  });
}

//! Locally optimal bandwidth at one point.
template<typename Data>
double
select_bandwidth_local(const Data& data, double t, const BandwidthPlan& plan)
{
  const double target[1] = { t };
  const auto crit = bandwidth_criterion(data, target, plan);
  return crit.bandwidths[crit.argmin_local(0)];
}

//! Locally optimal bandwidths on a grid, sharing the bootstrap replicates
//! across points. The resulting SMLE curve need not be monotone.
template<typename Data>
std::vector<double>
select_bandwidth_local_curve(const Data& data,
                             std::span<const double> grid,
                             const BandwidthPlan& plan)
{
  const auto crit = bandwidth_criterion(data, grid, plan);
  std::vector<double> h;
  for (std::size_t k = 0; k < grid.size(); ++k)
    h.push_back(crit.bandwidths[crit.argmin_local(k)]);
  return h;
}

//! Bandwidth minimizing the criterion summed over a grid.
template<typename Data>
double
select_bandwidth_global(const Data& data,
                        std::span<const double> grid,
                        const BandwidthPlan& plan)
{
  const auto crit = bandwidth_criterion(data, grid, plan);
  return crit.bandwidths[crit.argmin_global()];
}

//! Second derivative at t of the kernel-smoothed cdf x -> int IK_h0(x-u) dF(u),
//! i.e. sum_j m_j K'((t - x_j)/h0) / h0^2. Requires [t - h0, t + h0] to lie
//! inside [0, upper].
inline double
pilot_second_derivative(const StepDistribution& f,
                        double h0,
                        double t,
                        double upper = std::numeric_limits<double>::infinity())
{
  if (!(h0 > 0.0))
    throw UsageError("pilot bandwidth must be positive");
  if (t - h0 < 0.0 || t + h0 > upper)
    throw UsageError("evaluation point too close to the boundary");
  double sum = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j)
    sum += f.masses()[j] * TriweightKernel::derivative((t - f.points()[j]) / h0);
  return sum / (h0 * h0);
}

} // namespace shapefit
