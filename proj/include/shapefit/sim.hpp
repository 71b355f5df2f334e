#pragma once

#include "shapefit/error.hpp"
#include "shapefit/functionals.hpp"
#include "shapefit/generators.hpp"
#include "shapefit/incubation.hpp"
#include "shapefit/io.hpp"
#include "shapefit/laws.hpp"
#include "shapefit/log.hpp"
#include "shapefit/parallel.hpp"
#include "shapefit/parametric.hpp"
#include "shapefit/smle.hpp"
#include "shapefit/stats.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace shapefit {

enum class ExperimentKind
{
  percentile,
  mean,
  coverage
};

inline std::string
to_string(ExperimentKind k)
{
  switch (k) {
    case ExperimentKind::percentile:
      return "percentile";
    case ExperimentKind::mean:
      return "mean";
    case ExperimentKind::coverage:
      return "coverage";
  }
  return "percentile";
}

inline ExperimentKind
parse_experiment_kind(const std::string& s)
{
  if (s == "percentile")
    return ExperimentKind::percentile;
  if (s == "mean")
    return ExperimentKind::mean;
  if (s == "coverage")
    return ExperimentKind::coverage;
  throw UsageError("unknown experiment '" + s + "'");
}

//! Settings of the incubation simulation studies.
struct ExperimentConfig
{
  ExperimentKind kind = ExperimentKind::percentile;
  TruthSpec truth = TruthSpec::incubation_weibull();
  ExposureLaw exposure{ 0.0, 30.0 };
  std::size_t n = 500;
  int replications = 200;
  double bandwidth_constant = 6.0; // h = c n^{-1/5}
  double probability = 0.95;       // percentile level
  double domain = 20.0;
  std::uint64_t seed = 1;
  double max_failure_rate = 0.02;
  IcmOptions icm{};
  std::string output; // CSV path; empty for none

  void validate() const
  {
    if (n < 1)
      throw UsageError("n must be at least 1");
    if (replications < 1)
      throw UsageError("at least one replication is required");
    if (!(bandwidth_constant > 0.0))
      throw UsageError("bandwidth constant must be positive");
    if (!(probability > 0.0 && probability < 1.0))
      throw UsageError("probability must lie in (0,1)");
    if (!(domain > 0.0))
      throw UsageError("domain must be positive");
    exposure.validate();
  }

  double bandwidth() const
  {
    return bandwidth_constant * std::pow(static_cast<double>(n), -0.2);
  }
};

inline const std::vector<std::string>&
experiment_methods()
{
  static const std::vector<std::string> m{ "nonparametric", "weibull", "lognormal" };
  return m;
}

struct ExperimentRow
{
  int replication;
  std::string method;
  double estimate = std::numeric_limits<double>::quiet_NaN();
  bool ok = false;
};

struct ExperimentTable
{
  std::vector<ExperimentRow> rows; // replication-major, methods in fixed order
  std::map<std::string, Quartiles> summary;
  std::map<std::string, int> failures;

  std::vector<double> estimates(const std::string& method) const
  {
    std::vector<double> v;
    for (const auto& r : rows)
      if (r.method == method && r.ok)
        v.push_back(r.estimate);
    return v;
  }

  void write_csv(std::ostream& out) const
  {
    out << "replication,method,estimate,status\n";
    for (const auto& r : rows)
      out << r.replication << ',' << r.method << ',' << io::format_double(r.estimate) << ','
          << (r.ok ? "ok" : "failed") << '\n';
  }
};

namespace detail {

// Runs fn(data, method index) for every replication and method, collecting
// failures per method.
template<typename Estimate>
ExperimentTable
run_incubation_experiment(const ExperimentConfig& config, Estimate&& estimate)
{
  config.validate();
  const auto& methods = experiment_methods();
  const std::size_t nm = methods.size();
  const auto reps = static_cast<std::size_t>(config.replications);
  std::vector<ExperimentRow> rows(reps * nm);
  parallel_for(reps, [&](std::size_t r) {
    const auto data = gen_incubation(config.n, config.truth, config.exposure, config.seed, r);
    for (std::size_t m = 0; m < nm; ++m) {
      ExperimentRow& row = rows[r * nm + m];
      row.replication = static_cast<int>(r);
      row.method = methods[m];
      try {
        row.estimate = estimate(data, m);
        row.ok = std::isfinite(row.estimate);
      } catch (const Error& e) {
        log::warn("replication ", r, " method ", methods[m], " failed: ", e.what());
      }
    }
  });
  ExperimentTable table;
  table.rows = std::move(rows);
  for (const auto& m : methods) {
    const auto est = table.estimates(m);
    const int failed = config.replications - static_cast<int>(est.size());
    table.failures[m] = failed;
    if (failed > config.max_failure_rate * config.replications)
      throw NumericalError("method " + m + " failed in " + std::to_string(failed) + " of " +
                           std::to_string(config.replications) + " replications");
    if (!est.empty())
      table.summary[m] = quartiles(est);
  }
  return table;
}

} // namespace detail

//! Percentile estimates from the SMLE, the truncated Weibull MLE and the
//! log-normal MLE on simulated incubation samples.
inline ExperimentTable
experiment_percentile(const ExperimentConfig& config)
{
  ParametricOptions popt;
  popt.upper = config.domain;
  return detail::run_incubation_experiment(config, [&](const IncubationData& data,
                                                       std::size_t method) {
    switch (method) {
      case 0: {
        const auto f = inc_mle(data, config.icm).truncated_to(config.domain);
        const Smoother smle(f, std::min(config.bandwidth(), config.domain), config.domain);
        return smle_quantile(smle, config.probability).x;
      }
      case 1:
        return fit_parametric(data, ParametricFamily::weibull, popt).quantile(config.probability);
      default:
        return fit_parametric(data, ParametricFamily::lognormal, popt)
          .quantile(config.probability);
    }
  });
}

//! Mean estimates: mean of the MLE (mass beyond the domain moved to its
//! end) and the means of the two parametric fits.
inline ExperimentTable
experiment_mean(const ExperimentConfig& config)
{
  ParametricOptions popt;
  popt.upper = config.domain;
  return detail::run_incubation_experiment(config, [&](const IncubationData& data,
                                                       std::size_t method) {
    switch (method) {
      case 0:
        return mean_of_mle(inc_mle(data, config.icm).truncated_to(config.domain));
      case 1:
        return fit_parametric(data, ParametricFamily::weibull, popt).mean();
      default:
        return fit_parametric(data, ParametricFamily::lognormal, popt).mean();
    }
  });
}

} // namespace shapefit
