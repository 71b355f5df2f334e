#pragma once

#include "shapefit/error.hpp"
#include "shapefit/parametric.hpp"

#include <cmath>
#include <functional>
#include <string>

namespace shapefit {

//! Uniform law on [lo, hi]; lo == hi is a point mass. Used for exposure
//! lengths and for current status observation times.
struct UniformLaw
{
  double lo = 0.0;
  double hi = 1.0;

  bool degenerate() const { return lo == hi; }

  double sample(double u) const { return lo + (hi - lo) * u; }

  double cdf(double x) const
  {
    if (degenerate())
      return x >= lo ? 1.0 : 0.0;
    if (x <= lo)
      return 0.0;
    if (x >= hi)
      return 1.0;
    return (x - lo) / (hi - lo);
  }

  void validate() const
  {
    if (!(lo >= 0.0) || !(hi >= lo) || !std::isfinite(hi))
      throw UsageError("uniform law needs 0 <= lo <= hi < infinity");
  }
};

using ExposureLaw = UniformLaw;
using ObservationLaw = UniformLaw;

enum class TruthFamily
{
  truncated_exponential, // rate 1, truncated to [0, upper]
  truncated_weibull,     // 1 - exp(-beta x^alpha), truncated to [0, upper]
  uniform,               // uniform on [0, upper]
  degenerate,            // point mass at `location`
  custom
};

//! Distribution of the hidden event (or incubation) time.
struct TruthSpec
{
  TruthFamily family = TruthFamily::truncated_exponential;
  double upper = 2.0;
  double alpha = 3.03514;
  double beta = 0.002619;
  double location = 0.0;
  std::function<double(double)> custom_cdf;
  std::function<double(double)> custom_quantile;

  static TruthSpec truncated_exponential(double upper)
  {
    TruthSpec t;
    t.family = TruthFamily::truncated_exponential;
    t.upper = upper;
    return t;
  }

  static TruthSpec truncated_weibull(double alpha, double beta, double upper)
  {
    TruthSpec t;
    t.family = TruthFamily::truncated_weibull;
    t.alpha = alpha;
    t.beta = beta;
    t.upper = upper;
    return t;
  }

  //! Default incubation truth used in the simulations.
  static TruthSpec incubation_weibull()
  {
    return truncated_weibull(3.03514, 0.002619, 20.0);
  }

  static TruthSpec uniform(double upper)
  {
    TruthSpec t;
    t.family = TruthFamily::uniform;
    t.upper = upper;
    return t;
  }

  static TruthSpec degenerate(double at)
  {
    TruthSpec t;
    t.family = TruthFamily::degenerate;
    t.location = at;
    t.upper = std::max(at, 1e-300);
    return t;
  }

  double cdf(double x) const
  {
    switch (family) {
      case TruthFamily::truncated_exponential:
        if (x <= 0.0)
          return 0.0;
        if (x >= upper)
          return 1.0;
        return std::expm1(-x) / std::expm1(-upper);
      case TruthFamily::truncated_weibull:
        return weibull_trunc_cdf({ alpha, beta, upper }, x);
      case TruthFamily::uniform:
        return x <= 0.0 ? 0.0 : (x >= upper ? 1.0 : x / upper);
      case TruthFamily::degenerate:
        return x >= location ? 1.0 : 0.0;
      case TruthFamily::custom:
        return custom_cdf(x);
    }
    return 0.0;
  }

  double density(double x) const
  {
    switch (family) {
      case TruthFamily::truncated_exponential:
        if (x < 0.0 || x > upper)
          return 0.0;
        return std::exp(-x) / -std::expm1(-upper);
      case TruthFamily::truncated_weibull:
        return weibull_trunc_density({ alpha, beta, upper }, x);
      case TruthFamily::uniform:
        return (x < 0.0 || x > upper) ? 0.0 : 1.0 / upper;
      default:
        throw UsageError("density not available for this truth family");
    }
  }

  //! Inverse cdf at u in (0,1).
  double quantile(double u) const
  {
    switch (family) {
      case TruthFamily::truncated_exponential:
        return -std::log1p(u * std::expm1(-upper));
      case TruthFamily::truncated_weibull:
        return weibull_trunc_quantile({ alpha, beta, upper }, u);
      case TruthFamily::uniform:
        return u * upper;
      case TruthFamily::degenerate:
        return location;
      case TruthFamily::custom:
        if (!custom_quantile)
          throw UsageError("custom truth needs a quantile function for sampling");
        return custom_quantile(u);
    }
    return 0.0;
  }

  double mean() const
  {
    switch (family) {
      case TruthFamily::truncated_exponential:
        // int_0^M x e^-x dx / (1 - e^-M)
        return (1.0 - std::exp(-upper) * (1.0 + upper)) / -std::expm1(-upper);
      case TruthFamily::truncated_weibull:
        return weibull_trunc_mean({ alpha, beta, upper });
      case TruthFamily::uniform:
        return 0.5 * upper;
      case TruthFamily::degenerate:
        return location;
      default:
        throw UsageError("mean not available for a custom truth");
    }
  }
};

inline std::string
to_string(TruthFamily f)
{
  switch (f) {
    case TruthFamily::truncated_exponential:
      return "truncated-exponential";
    case TruthFamily::truncated_weibull:
      return "truncated-weibull";
    case TruthFamily::uniform:
      return "uniform";
    case TruthFamily::degenerate:
      return "degenerate";
    case TruthFamily::custom:
      return "custom";
  }
  return "custom";
}

inline TruthFamily
parse_truth_family(const std::string& s)
{
  if (s == "truncated-exponential")
    return TruthFamily::truncated_exponential;
  if (s == "truncated-weibull")
    return TruthFamily::truncated_weibull;
  if (s == "uniform")
    return TruthFamily::uniform;
  if (s == "degenerate")
    return TruthFamily::degenerate;
  throw UsageError("unknown truth family '" + s + "'");
}

} // namespace shapefit
