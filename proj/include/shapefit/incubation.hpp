#pragma once

#include "shapefit/error.hpp"
#include "shapefit/gcm.hpp"
#include "shapefit/log.hpp"
#include "shapefit/step_distribution.hpp"

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

namespace shapefit {

//! One traveller: exposure window length e and symptom onset time s,
//! both measured from the start of the exposure window.
struct IncubationRecord
{
  double e;
  double s;
};

struct IncubationData
{
  std::vector<IncubationRecord> records;

  std::size_t size() const { return records.size(); }

  //! Checks positivity and, when given, the separation bound e >= eps and
  //! the support bound s <= e + m1.
  void validate(std::optional<double> separation = std::nullopt,
                std::optional<double> support = std::nullopt) const
  {
    for (std::size_t i = 0; i < records.size(); ++i) {
      const auto& r = records[i];
      const std::string at = "record " + std::to_string(i + 1);
      if (!std::isfinite(r.e) || !(r.e > 0.0))
        throw DataError(at + ": exposure length must be finite and positive");
      if (!std::isfinite(r.s) || !(r.s > 0.0))
        throw DataError(at + ": symptom time must be finite and positive");
      if (separation && r.e < *separation)
        throw DataError(at + ": exposure length below the separation bound");
      if (support && r.s > r.e + *support)
        throw DataError(at + ": symptom time beyond exposure plus support bound");
    }
  }
};

// --------------------------------------------------------------------------
// Reduction to mixed-case interval censoring

struct IntervalCensoredRecord
{
  double e;         // exposure length (cell width)
  double t;         // offset in [0, e)
  std::size_t cell; // index j with s = t + j e

  double boundary(long j) const { return t + static_cast<double>(j) * e; }
  double reconstruct() const { return boundary(static_cast<long>(cell)); }
};

struct IntervalCensoredView
{
  std::vector<IntervalCensoredRecord> records;
};

inline IntervalCensoredView
reduce_to_interval_censoring(const IncubationData& data)
{
  IntervalCensoredView view;
  view.records.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& r = data.records[i];
    if (!(r.e > 0.0))
      throw DataError("record " + std::to_string(i + 1) +
                      ": exposure length must be positive");
    double j = std::floor(r.s / r.e);
    double t = r.s - j * r.e;
    // guard the floor against rounding at cell edges
    if (t < 0.0) {
      j -= 1.0;
      t = r.s - j * r.e;
    } else if (t >= r.e) {
      j += 1.0;
      t = r.s - j * r.e;
    }
    view.records.push_back({ r.e, t, static_cast<std::size_t>(std::max(0.0, j)) });
  }
  return view;
}

// --------------------------------------------------------------------------
// W and G processes

inline constexpr double default_denominator_floor = 1e-10;

//! Values of a right-continuous step process at its evaluation points.
struct ProcessSample
{
  std::vector<double> points;
  std::vector<double> values;
};

using WProcessSample = ProcessSample;

namespace detail {

struct Window
{
  double lo; // min S_i
  double hi; // max (S_i - E_i)
  bool empty() const { return !(lo <= hi); }
};

inline Window
likelihood_window(const IncubationData& data)
{
  Window w{ std::numeric_limits<double>::infinity(),
            -std::numeric_limits<double>::infinity() };
  for (const auto& r : data.records) {
    w.lo = std::min(w.lo, r.s);
    w.hi = std::max(w.hi, r.s - r.e);
  }
  return w;
}

struct Jump
{
  double at;
  double size;
};

// power 1: W increments (signed); power 2: G increments (both positive)
inline ProcessSample
build_process(const StepDistribution& f,
              const IncubationData& data,
              int power,
              double floor)
{
  const Window w = likelihood_window(data);
  ProcessSample out;
  if (data.records.empty() || w.empty())
    return out;
  const double inv_n = 1.0 / static_cast<double>(data.size());
  std::vector<Jump> jumps;
  std::vector<double> eval;
  for (const auto& r : data.records) {
    const double lower = r.s - r.e;
    const bool upper_in = r.s >= w.lo && r.s <= w.hi;
    const bool lower_in = lower >= w.lo && lower <= w.hi;
    if (upper_in)
      eval.push_back(r.s);
    if (lower_in)
      eval.push_back(lower);
    const double d = f.cdf(r.s) - f.cdf(lower);
    if (!(d > floor))
      continue; // 0/0 = 0
    const double v = power == 1 ? 1.0 / d : 1.0 / (d * d);
    if (upper_in)
      jumps.push_back({ r.s, v * inv_n });
    if (lower_in)
      jumps.push_back({ lower, (power == 1 ? -v : v) * inv_n });
  }
  std::sort(eval.begin(), eval.end());
  eval.erase(std::unique(eval.begin(), eval.end()), eval.end());
  std::sort(jumps.begin(), jumps.end(),
            [](const Jump& a, const Jump& b) { return a.at < b.at; });
  out.points = eval;
  out.values.resize(eval.size());
  double acc = 0.0;
  std::size_t k = 0;
  for (std::size_t p = 0; p < eval.size(); ++p) {
    while (k < jumps.size() && jumps[k].at <= eval[p])
      acc += jumps[k++].size;
    out.values[p] = acc;
  }
  return out;
}

} // namespace detail

//! Empirical process W_{n,F}(t) on the pooled ordered set of S_i and
//! S_i - E_i inside [min S_i, max(S_i - E_i)]. Terms whose denominator
//! F(s) - F(s-e) is at most `floor` contribute zero.
inline WProcessSample
w_process(const StepDistribution& f,
          const IncubationData& data,
          double floor = default_denominator_floor)
{
  return detail::build_process(f, data, 1, floor);
}

//! Weight process G_{n,F}(t): same window, squared denominators, both
//! terms added. Nondecreasing.
inline ProcessSample
g_process(const StepDistribution& f,
          const IncubationData& data,
          double floor = default_denominator_floor)
{
  return detail::build_process(f, data, 2, floor);
}

//! Incubation log likelihood sum_i log{F(S_i) - F(S_i - E_i)} (not divided
//! by n).
template<typename Cdf>
  requires std::invocable<Cdf, double>
double
inc_loglik(const IncubationData& data, Cdf&& cdf)
{
  double ll = 0.0;
  for (const auto& r : data.records) {
    const double d = cdf(r.s) - (r.s - r.e > 0.0 ? cdf(r.s - r.e) : 0.0);
    ll += d > 0.0 ? std::log(d) : -INFINITY;
  }
  return ll;
}

inline double
inc_loglik(const IncubationData& data, const StepDistribution& f)
{
  return inc_loglik(data, [&](double x) { return f.cdf(x); });
}

// --------------------------------------------------------------------------
// Optimality certificate

//! Primal-dual optimality measures for a candidate F with atoms at the S_i.
//!
//! With tail(t) = W(end) - W(t-), the maximizer satisfies tail <= 0 at every
//! evaluation point, int W(t-) dF(t) = 0 and sum over atoms of mass * tail
//! = 0. W is held at its last value to the right of the window.
struct FenchelGap
{
  double max_violation = 0.0;
  double complementarity = 0.0;
  double slackness = 0.0;

  double worst() const
  {
    return std::max({ max_violation, complementarity, slackness });
  }
};

inline FenchelGap
fenchel_gap(const StepDistribution& f,
            const IncubationData& data,
            double floor = default_denominator_floor)
{
  const WProcessSample w = w_process(f, data, floor);
  FenchelGap gap;
  if (w.points.empty())
    return gap;
  const double w_end = w.values.back();
  // left limit of W at x
  auto left = [&](double x) {
    auto it = std::lower_bound(w.points.begin(), w.points.end(), x);
    if (it == w.points.begin())
      return 0.0;
    if (it == w.points.end())
      return w_end;
    return w.values[static_cast<std::size_t>(it - w.points.begin()) - 1];
  };
  double violation = 0.0;
  for (std::size_t p = 0; p < w.points.size(); ++p) {
    const double before = p == 0 ? 0.0 : w.values[p - 1];
    violation = std::max(violation, w_end - before);
  }
  double integral = 0.0;
  double slack = 0.0;
  const double hi = w.points.back();
  for (std::size_t a = 0; a < f.size(); ++a) {
    const double mass = f.masses()[a];
    if (mass == 0.0)
      continue;
    const double x = f.points()[a];
    const double wl = left(x);
    integral += mass * wl;
    if (x <= hi)
      slack += mass * (w_end - wl);
  }
  gap.max_violation = violation;
  gap.complementarity = std::abs(integral);
  gap.slackness = std::abs(slack);
  return gap;
}

// --------------------------------------------------------------------------
// Iterative convex minorant algorithm

struct IcmOptions
{
  double tol = 1e-8;
  int max_iter = 20000;
  double floor = default_denominator_floor;
  int max_halvings = 60;
};

struct IcmReport
{
  int iterations = 0;
  FenchelGap gap;
  double loglik = 0.0;
};

namespace detail {

// Atom-indexed form of the likelihood. Atoms are the distinct S_i; cdf
// values y[1..k] at atoms inside the window are free, y[0] = 0 stands for
// "below every atom" and atoms past the window carry y = 1.
struct IcmProblem
{
  std::vector<double> atoms;
  std::size_t free = 0; // k
  std::vector<std::size_t> upper;
  std::vector<std::size_t> lower;
  double inv_n = 1.0;

  explicit IcmProblem(const IncubationData& data)
  {
    const std::size_t n = data.size();
    inv_n = 1.0 / static_cast<double>(n);
    atoms.reserve(n);
    for (const auto& r : data.records)
      atoms.push_back(r.s);
    std::sort(atoms.begin(), atoms.end());
    atoms.erase(std::unique(atoms.begin(), atoms.end()), atoms.end());
    const Window w = likelihood_window(data);
    free = static_cast<std::size_t>(
      std::upper_bound(atoms.begin(), atoms.end(), w.hi) - atoms.begin());
    upper.resize(n);
    lower.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& r = data.records[i];
      upper[i] = static_cast<std::size_t>(
                   std::lower_bound(atoms.begin(), atoms.end(), r.s) - atoms.begin()) +
                 1;
      lower[i] = static_cast<std::size_t>(
        std::upper_bound(atoms.begin(), atoms.end(), r.s - r.e) - atoms.begin());
    }
  }

  // full cdf vector of length m+1 from the free values
  void fill(const std::vector<double>& y, std::vector<double>& full) const
  {
    full.assign(atoms.size() + 1, 1.0);
    full[0] = 0.0;
    for (std::size_t j = 1; j <= free; ++j)
      full[j] = y[j];
  }
};

// gradient (tail-summable) and ICM weights over free atoms, 1-based
inline void
icm_derivatives(const IcmProblem& prob,
                const std::vector<double>& full,
                double floor,
                std::vector<double>& grad,
                std::vector<double>& weight)
{
  const std::size_t k = prob.free;
  grad.assign(k + 1, 0.0);
  weight.assign(k + 1, 0.0);
  for (std::size_t i = 0; i < prob.upper.size(); ++i) {
    const std::size_t u = prob.upper[i];
    const std::size_t l = prob.lower[i];
    const double d = full[u] - full[l];
    if (!(d > floor))
      continue;
    const double g = prob.inv_n / d;
    const double w = g / d;
    if (u <= k) {
      grad[u] += g;
      weight[u] += w;
    }
    if (l >= 1 && l <= k) {
      grad[l] -= g;
      weight[l] += w;
    }
  }
}

inline FenchelGap
atom_gap(const IcmProblem& prob,
         const std::vector<double>& y,
         const std::vector<double>& grad)
{
  const std::size_t k = prob.free;
  FenchelGap gap;
  if (k == 0)
    return gap;
  // tail[j] = sum_{i >= j} grad[i]
  double tail = 0.0;
  double max_tail = -INFINITY;
  double slack = 0.0;
  std::vector<double> tails(k + 2, 0.0);
  for (std::size_t j = k; j >= 1; --j) {
    tail += grad[j];
    tails[j] = tail;
    max_tail = std::max(max_tail, tail);
  }
  const double total = tails[1];
  double integral = 0.0;
  for (std::size_t j = 1; j <= k; ++j) {
    const double p = y[j] - y[j - 1];
    slack += p * tails[j];
    integral += p * (total - tails[j]);
  }
  integral += (1.0 - y[k]) * total;
  gap.max_violation = std::max(0.0, max_tail);
  gap.complementarity = std::abs(integral);
  gap.slackness = std::abs(slack);
  return gap;
}

inline double
loglik_full(const IcmProblem& prob, const std::vector<double>& full)
{
  double ll = 0.0;
  for (std::size_t i = 0; i < prob.upper.size(); ++i) {
    const double d = full[prob.upper[i]] - full[prob.lower[i]];
    ll += d > 0.0 ? std::log(d) : -INFINITY;
  }
  return ll;
}

// exact change in log likelihood along full + lambda * dir
inline double
loglik_change(const IcmProblem& prob,
              const std::vector<double>& full,
              const std::vector<double>& dir,
              double lambda)
{
  double change = 0.0;
  for (std::size_t i = 0; i < prob.upper.size(); ++i) {
    const std::size_t u = prob.upper[i];
    const std::size_t l = prob.lower[i];
    const double d = full[u] - full[l];
    const double dd = lambda * (dir[u] - dir[l]);
    if (dd == 0.0)
      continue;
    const double r = dd / d;
    if (!(r > -1.0))
      return -INFINITY;
    change += std::log1p(r);
  }
  return change;
}

inline StepDistribution
to_distribution(const IcmProblem& prob, const std::vector<double>& full)
{
  std::vector<double> masses(prob.atoms.size());
  for (std::size_t j = 1; j < full.size(); ++j)
    masses[j - 1] = std::max(0.0, full[j] - full[j - 1]);
  return StepDistribution(prob.atoms, std::move(masses));
}

} // namespace detail

//! Nonparametric MLE for incubation data with mass restricted to the S_i.
//!
//! Damped iterative convex minorant algorithm: each step takes the slopes
//! of the self-induced cusum diagram (G, int F dG + W) as a target and
//! backtracks along the segment towards it until the likelihood increases.
//! Stops once the optimality certificate is below `tol`.
inline StepDistribution
inc_mle(const IncubationData& data,
        const IcmOptions& opt = {},
        IcmReport* report = nullptr,
        const StepDistribution* start = nullptr)
{
  if (data.records.empty())
    throw UsageError("empty data");
  if (!(opt.tol > 0.0))
    throw UsageError("tolerance must be positive");
  data.validate();

  const detail::IcmProblem prob(data);
  const std::size_t k = prob.free;
  const std::size_t m = prob.atoms.size();

  std::vector<double> y(k + 1, 0.0);
  if (start) {
    for (std::size_t j = 1; j <= k; ++j)
      y[j] = start->cdf(prob.atoms[j - 1]);
  } else {
    for (std::size_t j = 1; j <= k; ++j)
      y[j] = static_cast<double>(j) / static_cast<double>(m);
  }

  std::vector<double> full;
  prob.fill(y, full);
  if (!std::isfinite(detail::loglik_full(prob, full)))
    throw UsageError("starting distribution has zero likelihood");

  std::vector<double> grad, weight, cx(k), cy(k), dir(m + 1, 0.0);
  FenchelGap gap;
  int iter = 0;
  for (;; ++iter) {
    detail::icm_derivatives(prob, full, opt.floor, grad, weight);
    gap = detail::atom_gap(prob, y, grad);
    if (gap.worst() <= opt.tol)
      break;
    if (iter >= opt.max_iter)
      throw NumericalError("ICM did not converge after " + std::to_string(iter) +
                           " iterations; Fenchel gap " + std::to_string(gap.worst()));

    double wmax = 0.0;
    for (std::size_t j = 1; j <= k; ++j)
      wmax = std::max(wmax, weight[j]);
    double sx = 0.0, sy = 0.0;
    for (std::size_t j = 1; j <= k; ++j) {
      const double w = std::max(weight[j], 1e-12 * wmax);
      sx += w;
      sy += w * y[j] + grad[j];
      cx[j - 1] = sx;
      cy[j - 1] = sy;
    }
    const SlopeVector target = gcm_slopes(cx, cy);
    std::fill(dir.begin(), dir.end(), 0.0);
    for (std::size_t j = 1; j <= k; ++j)
      dir[j] = std::clamp(target[j - 1], 0.0, 1.0) - y[j];

    double lambda = 1.0;
    bool accepted = false;
    for (int h = 0; h <= opt.max_halvings; ++h, lambda *= 0.5) {
      if (detail::loglik_change(prob, full, dir, lambda) > 0.0) {
        accepted = true;
        break;
      }
    }
    if (!accepted)
      throw NumericalError("ICM line search stalled; Fenchel gap " +
                           std::to_string(gap.worst()));
    for (std::size_t j = 1; j <= k; ++j)
      y[j] += lambda * dir[j];
    // keep exact monotonicity after rounding
    for (std::size_t j = 1; j <= k; ++j)
      y[j] = std::clamp(y[j], y[j - 1], 1.0);
    prob.fill(y, full);
  }

  if (report) {
    report->iterations = iter;
    report->gap = gap;
    report->loglik = detail::loglik_full(prob, full);
  }
  return detail::to_distribution(prob, full);
}

inline StepDistribution
inc_mle(const IncubationData& data, double tol, int max_iter)
{
  IcmOptions opt;
  opt.tol = tol;
  opt.max_iter = max_iter;
  return inc_mle(data, opt);
}

} // namespace shapefit
