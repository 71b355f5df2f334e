#pragma once

#include "shapefit/error.hpp"
#include "shapefit/incubation.hpp"
#include "shapefit/nelder_mead.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

namespace shapefit {

//! Weibull distribution F(x) = 1 - exp(-beta x^alpha) truncated to [0, upper].
struct WeibullTruncParams
{
  double alpha;
  double beta;
  double upper = 20.0;
};

//! Log-normal distribution Phi((log x - alpha) / beta).
struct LogNormalParams
{
  double alpha;
  double beta;
};

inline double
std_normal_cdf(double z)
{
  return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

inline double
weibull_trunc_cdf(const WeibullTruncParams& p, double x)
{
  if (x <= 0.0)
    return 0.0;
  if (x >= p.upper)
    return 1.0;
  const double norm = -std::expm1(-p.beta * std::pow(p.upper, p.alpha));
  return -std::expm1(-p.beta * std::pow(x, p.alpha)) / norm;
}

inline double
weibull_trunc_density(const WeibullTruncParams& p, double x)
{
  if (x <= 0.0 || x >= p.upper)
    return 0.0;
  const double norm = -std::expm1(-p.beta * std::pow(p.upper, p.alpha));
  const double xa = std::pow(x, p.alpha);
  return p.alpha * p.beta * xa / x * std::exp(-p.beta * xa) / norm;
}

inline double
weibull_trunc_quantile(const WeibullTruncParams& p, double q)
{
  if (!(q > 0.0 && q < 1.0))
    throw UsageError("quantile level must lie in (0,1)");
  const double norm = -std::expm1(-p.beta * std::pow(p.upper, p.alpha));
  return std::pow(-std::log1p(-q * norm) / p.beta, 1.0 / p.alpha);
}

inline double
weibull_trunc_mean(const WeibullTruncParams& p)
{
  using boost::math::quadrature::gauss_kronrod;
  auto survival = [&](double x) { return 1.0 - weibull_trunc_cdf(p, x); };
  return gauss_kronrod<double, 61>::integrate(survival, 0.0, p.upper, 15, 1e-13);
}

inline double
lognormal_cdf(const LogNormalParams& p, double x)
{
  if (x <= 0.0)
    return 0.0;
  return std_normal_cdf((std::log(x) - p.alpha) / p.beta);
}

inline double
lognormal_quantile(const LogNormalParams& p, double q)
{
  if (!(q > 0.0 && q < 1.0))
    throw UsageError("quantile level must lie in (0,1)");
  // bisection on the standard normal quantile
  double lo = -40.0, hi = 40.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    (std_normal_cdf(mid) < q ? lo : hi) = mid;
  }
  return std::exp(p.alpha + p.beta * 0.5 * (lo + hi));
}

inline double
lognormal_mean(const LogNormalParams& p)
{
  return std::exp(p.alpha + 0.5 * p.beta * p.beta);
}

namespace detail {

// F(b) - F(a) for a < b without cancellation
inline double
weibull_increment(const WeibullTruncParams& p, double a, double b)
{
  if (b >= p.upper)
    return 1.0 - weibull_trunc_cdf(p, a);
  if (a <= 0.0)
    return weibull_trunc_cdf(p, b);
  const double norm = -std::expm1(-p.beta * std::pow(p.upper, p.alpha));
  const double ha = p.beta * std::pow(a, p.alpha);
  const double hb = p.beta * std::pow(b, p.alpha);
  return std::exp(-ha) * -std::expm1(-(hb - ha)) / norm;
}

inline double
lognormal_increment(const LogNormalParams& p, double a, double b)
{
  const double zb = (std::log(b) - p.alpha) / p.beta;
  if (a <= 0.0)
    return std_normal_cdf(zb);
  const double za = (std::log(a) - p.alpha) / p.beta;
  if (za > 0.0) // upper tail: use survival functions
    return 0.5 * (std::erfc(za / std::numbers::sqrt2) - std::erfc(zb / std::numbers::sqrt2));
  return 0.5 * (std::erfc(-zb / std::numbers::sqrt2) - std::erfc(-za / std::numbers::sqrt2));
}

} // namespace detail

enum class ParametricFamily
{
  weibull,
  lognormal
};

inline std::string
to_string(ParametricFamily f)
{
  return f == ParametricFamily::weibull ? "weibull" : "lognormal";
}

inline ParametricFamily
parse_family(const std::string& s)
{
  if (s == "weibull")
    return ParametricFamily::weibull;
  if (s == "lognormal" || s == "log-normal")
    return ParametricFamily::lognormal;
  throw UsageError("unknown parametric family '" + s + "'");
}

struct ParametricFit
{
  ParametricFamily family;
  double alpha;
  double beta;
  double upper = 20.0; // Weibull truncation point
  double loglik;
  int starts_succeeded = 0;

  double cdf(double x) const
  {
    return family == ParametricFamily::weibull
             ? weibull_trunc_cdf({ alpha, beta, upper }, x)
             : lognormal_cdf({ alpha, beta }, x);
  }

  double quantile(double q) const
  {
    return family == ParametricFamily::weibull
             ? weibull_trunc_quantile({ alpha, beta, upper }, q)
             : lognormal_quantile({ alpha, beta }, q);
  }

  double mean() const
  {
    return family == ParametricFamily::weibull
             ? weibull_trunc_mean({ alpha, beta, upper })
             : lognormal_mean({ alpha, beta });
  }
};

//! Interval-censored log likelihood sum_i log{F(S_i) - F(S_i - E_i)}.
//! Terms below `floor` are replaced by `floor` (pass 0 for the exact value).
inline double
weibull_loglik(const IncubationData& data, const WeibullTruncParams& p, double floor = 0.0)
{
  double ll = 0.0;
  for (const auto& r : data.records) {
    const double d = detail::weibull_increment(p, r.s - r.e, r.s);
    ll += d > floor ? std::log(d) : (floor > 0.0 ? std::log(floor) : -std::numeric_limits<double>::infinity());
  }
  return ll;
}

inline double
lognormal_loglik(const IncubationData& data, const LogNormalParams& p, double floor = 0.0)
{
  double ll = 0.0;
  for (const auto& r : data.records) {
    const double d = detail::lognormal_increment(p, r.s - r.e, r.s);
    ll += d > floor ? std::log(d) : (floor > 0.0 ? std::log(floor) : -std::numeric_limits<double>::infinity());
  }
  return ll;
}

struct ParametricOptions
{
  double upper = 20.0; // Weibull truncation
  NelderMeadOptions nm{};
};

//! Maximum likelihood fit of a Weibull (truncated) or log-normal model to
//! incubation data. Simplex search over log-transformed parameters from five
//! starts; the best start is restarted once to polish the optimum.
inline ParametricFit
fit_parametric(const IncubationData& data,
               ParametricFamily family,
               const ParametricOptions& opt = {})
{
  if (data.size() < 2)
    throw UsageError("parametric fit needs at least two records");
  data.validate();

  constexpr double search_floor = 1e-300;
  std::vector<double> mids;
  for (const auto& r : data.records)
    mids.push_back(std::max(1e-3, r.s - 0.5 * std::min(r.e, r.s)));
  std::sort(mids.begin(), mids.end());
  const double med = mids[mids.size() / 2];
  const double mx = mids.back();

  std::vector<std::vector<double>> starts;
  std::function<double(const std::vector<double>&)> objective;

  // Weibull is searched over (log alpha, log scale) with beta = scale^-alpha
  if (family == ParametricFamily::weibull) {
    for (double a : { 1.5, 3.0, 5.0 })
      starts.push_back({ std::log(a), std::log(med / std::pow(std::log(2.0), 1.0 / a)) });
    starts.push_back({ std::log(1.0), std::log(med) });
    starts.push_back({ std::log(8.0), std::log(mx) });
    objective = [&](const std::vector<double>& z) {
      const double a = std::exp(z[0]);
      const double beta = std::exp(-a * z[1]);
      if (!std::isfinite(a) || !(beta > 0.0) || !std::isfinite(beta))
        return std::numeric_limits<double>::infinity();
      return -weibull_loglik(data, { a, beta, opt.upper }, search_floor);
    };
  } else {
    const double lm = std::log(med);
    starts = { { lm, std::log(0.25) }, { lm, std::log(0.5) }, { lm, std::log(1.0) },
               { lm - 0.5, std::log(0.5) }, { lm + 0.5, std::log(0.5) } };
    objective = [&](const std::vector<double>& z) {
      return -lognormal_loglik(data, { z[0], std::exp(z[1]) }, search_floor);
    };
  }

  NelderMeadResult best;
  int ok = 0;
  for (const auto& s : starts) {
    auto r = nelder_mead(objective, s, opt.nm);
    if (std::isfinite(r.value)) {
      ++ok;
      if (r.value < best.value)
        best = r;
    }
  }
  if (ok == 0)
    throw NumericalError("parametric fit: no start produced a finite likelihood");
  for (int polish = 0; polish < 2; ++polish) {
    NelderMeadOptions fine = opt.nm;
    fine.initial_step = 0.05;
    auto r = nelder_mead(objective, best.x, fine);
    if (r.value <= best.value)
      best = r;
  }

  ParametricFit fit;
  fit.family = family;
  fit.upper = opt.upper;
  fit.starts_succeeded = ok;
  if (family == ParametricFamily::weibull) {
    fit.alpha = std::exp(best.x[0]);
    fit.beta = std::exp(-fit.alpha * best.x[1]);
    fit.loglik = weibull_loglik(data, { fit.alpha, fit.beta, opt.upper });
  } else {
    fit.alpha = best.x[0];
    fit.beta = std::exp(best.x[1]);
    fit.loglik = lognormal_loglik(data, { fit.alpha, fit.beta });
  }
  return fit;
}

} // namespace shapefit
