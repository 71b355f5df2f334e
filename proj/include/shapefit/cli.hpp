#pragma once

#include "shapefit/bandwidth.hpp"
#include "shapefit/config.hpp"
#include "shapefit/confidence.hpp"
#include "shapefit/current_status.hpp"
#include "shapefit/error.hpp"
#include "shapefit/functionals.hpp"
#include "shapefit/generators.hpp"
#include "shapefit/incubation.hpp"
#include "shapefit/io.hpp"
#include "shapefit/laws.hpp"
#include "shapefit/parallel.hpp"
#include "shapefit/parametric.hpp"
#include "shapefit/sim.hpp"
#include "shapefit/smle.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace shapefit::cli {

enum ExitCode
{
  exit_ok = 0,
  exit_usage = 1,
  exit_data = 2,
  exit_numerical = 3
};

struct Options
{
  std::string model = "current-status";
  std::string input;
  std::string output;
  std::string config;
  std::optional<double> bandwidth;
  std::optional<double> pilot;
  int bootstrap = 1000;
  double alpha = 0.05;
  std::optional<std::uint64_t> seed;
  std::string grid;
  unsigned threads = 0;
  std::string family = "weibull";
  std::string functional = "mean";
  std::optional<double> domain;
  double probability = 0.95;
  bool local = false;
  std::size_t n = 500;
  int grid_size = 400;
  double at = 5.0;
  double sample_size = 4000.0;
};

namespace detail {

inline bool
incubation_model(const Options& o)
{
  if (o.model == "current-status")
    return false;
  if (o.model == "incubation")
    return true;
  throw UsageError("unknown model '" + o.model + "' (expected current-status or incubation)");
}

inline double
domain_of(const Options& o)
{
  const double d = o.domain.value_or(incubation_model(o) ? 20.0 : 2.0);
  if (!(d > 0.0))
    throw UsageError("domain must be positive");
  return d;
}

// Interior grid with 100 cells when --grid is absent.
inline std::vector<double>
grid_of(const Options& o, double domain)
{
  if (!o.grid.empty())
    return config::parse_grid(o.grid);
  const double step = domain / 100.0;
  return config::make_grid(step, domain - step, step);
}

inline std::string
require_input(const Options& o)
{
  if (o.input.empty())
    throw UsageError("--input is required");
  return o.input;
}

inline void
emit(const Options& o, std::ostream& out, const std::function<void(std::ostream&)>& write)
{
  if (o.output.empty()) {
    write(out);
    return;
  }
  std::ofstream file(o.output);
  if (!file)
    throw DataError("cannot open output file '" + o.output + "'");
  write(file);
  if (!file)
    throw DataError("failed writing output file '" + o.output + "'");
}

inline void
emit_json(const Options& o, std::ostream& out, const nlohmann::json& j)
{
  emit(o, out, [&](std::ostream& s) { s << j.dump(2) << '\n'; });
}

inline std::size_t
sample_size(const Options& o)
{
  return incubation_model(o) ? io::read_incubation(require_input(o)).size()
                             : io::read_current_status(require_input(o)).size();
}

// --------------------------------------------------------------------------
// Subcommands

inline void
cmd_mle(const Options& o, std::ostream& out)
{
  StepDistribution f;
  if (incubation_model(o)) {
    f = inc_mle(io::read_incubation(require_input(o)));
    if (o.domain)
      f = f.truncated_to(*o.domain);
  } else {
    f = cs_mle(io::read_current_status(require_input(o)));
  }
  emit(o, out, [&](std::ostream& s) { io::write_step_cdf(s, f); });
}

inline StepDistribution
mle_on_domain(const Options& o, double domain)
{
  if (incubation_model(o))
    return inc_mle(io::read_incubation(require_input(o))).truncated_to(domain);
  return cs_mle(io::read_current_status(require_input(o)));
}

inline void
cmd_smle(const Options& o, std::ostream& out)
{
  if (!o.bandwidth)
    throw UsageError("--bandwidth is required");
  const double domain = domain_of(o);
  const auto f = mle_on_domain(o, domain);
  const auto grid = grid_of(o, domain);
  const auto curve = smle_curve(f, *o.bandwidth, grid, domain);
  emit(o, out, [&](std::ostream& s) { io::write_curve(s, curve); });
}

inline void
cmd_bandwidth(const Options& o, std::ostream& out)
{
  const bool inc = incubation_model(o);
  const double domain = domain_of(o);
  BandwidthPlan plan = inc ? BandwidthPlan::incubation(domain) : BandwidthPlan::current_status(domain);
  plan.B = o.bootstrap;
  if (!o.config.empty())
    plan = config::plan_from_json(config::load_json(o.config), plan);
  if (o.seed)
    plan.seed = *o.seed;
  std::vector<double> targets = plan.targets;
  if (!o.grid.empty() || targets.empty())
    targets = grid_of(o, plan.domain);

  CurrentStatusData cs;
  IncubationData id;
  if (inc)
    id = io::read_incubation(require_input(o));
  else
    cs = io::read_current_status(require_input(o));
  const std::size_t n = inc ? id.size() : cs.size();
  if (o.pilot)
    plan.c0 = *o.pilot * std::pow(static_cast<double>(n), 1.0 / 9.0);

  const BandwidthCriterion crit =
    inc ? bandwidth_criterion(id, targets, plan) : bandwidth_criterion(cs, targets, plan);
  if (o.local) {
    emit(o, out, [&](std::ostream& s) {
      s << "t,bandwidth\n";
      for (std::size_t k = 0; k < targets.size(); ++k)
        s << io::format_double(targets[k]) << ','
          << io::format_double(crit.bandwidths[crit.argmin_local(k)]) << '\n';
    });
    return;
  }
  const std::size_t best = crit.argmin_global();
  nlohmann::json j;
  j["bandwidth"] = crit.bandwidths[best];
  j["constant"] = crit.constants[best];
  j["pilot"] = plan.pilot_bandwidth(n);
  j["B"] = plan.B;
  j["seed"] = plan.seed;
  j["n"] = n;
  emit_json(o, out, j);
}

inline void
cmd_ci(const Options& o, std::ostream& out)
{
  if (!o.bandwidth || !o.pilot)
    throw UsageError("--bandwidth and --pilot are required");
  const double domain = domain_of(o);
  const auto grid = grid_of(o, domain);
  const std::uint64_t seed = o.seed.value_or(1);
  const ConfidenceBand band =
    incubation_model(o)
      ? incubation_ci(io::read_incubation(require_input(o)), grid, *o.bandwidth, *o.pilot,
                      o.bootstrap, o.alpha, seed, domain)
      : cs_ci_studentized(io::read_current_status(require_input(o)), grid, *o.bandwidth,
                          *o.pilot, o.bootstrap, o.alpha, seed, domain);
  emit(o, out, [&](std::ostream& s) { io::write_band(s, band); });
}

inline void
cmd_fit(const Options& o, std::ostream& out)
{
  ParametricOptions popt;
  popt.upper = o.domain.value_or(20.0);
  const auto data = io::read_incubation(require_input(o));
  const auto fit = fit_parametric(data, parse_family(o.family), popt);
  nlohmann::json j;
  j["family"] = to_string(fit.family);
  j["alpha"] = fit.alpha;
  j["beta"] = fit.beta;
  if (fit.family == ParametricFamily::weibull)
    j["upper"] = fit.upper;
  j["loglik"] = fit.loglik;
  j["quantile"] = fit.quantile(o.probability);
  j["probability"] = o.probability;
  j["mean"] = fit.mean();
  emit_json(o, out, j);
}

inline void
cmd_quantile(const Options& o, std::ostream& out)
{
  const double domain = domain_of(o);
  const auto f = mle_on_domain(o, domain);
  const std::size_t n = sample_size(o);
  const double h = o.bandwidth.value_or(
    (incubation_model(o) ? 6.0 : 1.5) * std::pow(static_cast<double>(n), -0.2));
  const QuantileResult q = smle_quantile(Smoother(f, h, domain), o.probability);
  nlohmann::json j;
  j["probability"] = o.probability;
  j["quantile"] = q.x;
  j["bandwidth"] = h;
  j["below_range"] = q.below_range;
  j["above_range"] = q.above_range;
  emit_json(o, out, j);
}

inline void
cmd_mean(const Options& o, std::ostream& out)
{
  StepDistribution f = incubation_model(o)
                         ? mle_on_domain(o, domain_of(o))
                         : cs_mle(io::read_current_status(require_input(o)));
  nlohmann::json j;
  j["mean"] = mean_of_mle(f);
  j["total_mass"] = f.total_mass();
  emit_json(o, out, j);
}

struct ModelSpec
{
  TruthSpec truth = TruthSpec::incubation_weibull();
  ExposureLaw exposure{ 1.0, 30.0 };
  ObservationLaw observation{ 0.0, 2.0 };
};

inline ModelSpec
model_spec(const Options& o, bool incubation)
{
  ModelSpec m;
  if (!incubation)
    m.truth = TruthSpec::truncated_exponential(2.0);
  if (o.config.empty())
    return m;
  const auto j = config::load_json(o.config);
  config::detail::check_keys(j, "model config", { "truth", "exposure", "observation" });
  if (j.contains("truth"))
    m.truth = config::truth_from_json(j.at("truth"));
  if (j.contains("exposure"))
    m.exposure = config::uniform_law_from_json(j.at("exposure"), "exposure");
  if (j.contains("observation"))
    m.observation = config::uniform_law_from_json(j.at("observation"), "observation");
  return m;
}

inline void
cmd_variance(const Options& o, std::ostream& out)
{
  const ModelSpec m = model_spec(o, true);
  const double upper = o.domain.value_or(m.truth.upper);
  auto F = [&](double x) { return m.truth.cdf(x); };
  nlohmann::json j;
  j["functional"] = o.functional;
  j["grid"] = o.grid_size;
  if (o.functional == "mean") {
    const VarianceReport rep = asymptotic_variance_mean(F, upper, m.exposure, o.grid_size);
    j["sigma2"] = rep.sigma2;
    j["residual"] = rep.residual;
    j["refinement_delta"] = rep.refinement_delta;
  } else if (o.functional == "smle") {
    if (!o.bandwidth)
      throw UsageError("--bandwidth is required for the smle functional");
    j["sigma2"] = smle_asymptotic_variance(F, upper, m.exposure, o.at, *o.bandwidth,
                                           o.sample_size, o.grid_size);
    j["t"] = o.at;
    j["bandwidth"] = *o.bandwidth;
    j["n"] = o.sample_size;
  } else {
    throw UsageError("unknown functional '" + o.functional + "' (expected mean or smle)");
  }
  emit_json(o, out, j);
}

inline void
cmd_simulate(const Options& o, std::ostream& out)
{
  const bool inc = incubation_model(o);
  const ModelSpec m = model_spec(o, inc);
  const std::uint64_t seed = o.seed.value_or(1);
  if (inc) {
    const auto data = gen_incubation(o.n, m.truth, m.exposure, seed);
    emit(o, out, [&](std::ostream& s) { io::write_incubation(s, data); });
  } else {
    const auto data = gen_current_status(o.n, m.truth, m.observation, seed);
    emit(o, out, [&](std::ostream& s) { io::write_current_status(s, data); });
  }
}

inline void
cmd_experiment(const Options& o, std::ostream& out)
{
  if (o.config.empty())
    throw UsageError("--config is required");
  config::ExperimentFile file = config::experiment_from_json(config::load_json(o.config));
  Options eff = o;
  if (eff.output.empty())
    eff.output = file.experiment.output;
  nlohmann::json summary;
  summary["experiment"] = to_string(file.kind);
  if (file.kind == ExperimentKind::coverage) {
    if (o.seed)
      file.coverage.seed = *o.seed;
    const CoverageResult res = coverage_experiment(file.coverage);
    emit(eff, out, [&](std::ostream& s) { io::write_coverage(s, res); });
    summary["replications"] = res.replications;
    summary["failures"] = res.failures;
    summary["interior_mean_noncoverage"] =
      res.mean_over(file.coverage.h(), file.coverage.domain - file.coverage.h());
  } else {
    if (o.seed)
      file.experiment.seed = *o.seed;
    const ExperimentTable table = file.kind == ExperimentKind::percentile
                                    ? experiment_percentile(file.experiment)
                                    : experiment_mean(file.experiment);
    emit(eff, out, [&](std::ostream& s) { table.write_csv(s); });
    for (const auto& [method, q] : table.summary)
      summary["summary"][method] = { { "q1", q.q1 },
                                     { "median", q.median },
                                     { "q3", q.q3 },
                                     { "failures", table.failures.at(method) } };
  }
  // the summary goes to the terminal only when the table went to a file
  if (!eff.output.empty())
    out << summary.dump(2) << '\n';
}

} // namespace detail

//! Runs the command line; returns the process exit code. Results go to
//! `out` unless --output is given; diagnostics go to `err`.
inline int
run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr)
{
  CLI::App app{ "Shape-constrained estimation for current status and incubation-time data",
                "shapefit" };
  app.require_subcommand(1);
  Options o;
  app.add_option("--threads", o.threads, "Cap on worker threads (0 = all cores)");

  auto model = [&](CLI::App* c) {
    c->add_option("--model", o.model, "current-status | incubation")
      ->check(CLI::IsMember({ "current-status", "incubation" }));
  };
  auto input = [&](CLI::App* c) {
    c->add_option("--input", o.input, "Input CSV (t,delta or e,s)");
  };
  auto output = [&](CLI::App* c) {
    c->add_option("--output", o.output, "Output path (default: standard output)");
  };
  auto domain = [&](CLI::App* c) {
    c->add_option("--domain", o.domain, "Upper end of the support (2 or 20 by default)");
  };
  auto grid = [&](CLI::App* c) { c->add_option("--grid", o.grid, "Grid a:b:step"); };
  auto seed = [&](CLI::App* c) { c->add_option("--seed", o.seed, "Random seed"); };

  std::vector<std::pair<CLI::App*, std::function<void(const Options&, std::ostream&)>>> cmds;

  auto* mle = app.add_subcommand("mle", "Nonparametric MLE as an x,cdf table");
  model(mle), input(mle), output(mle), domain(mle);
  cmds.emplace_back(mle, detail::cmd_mle);

  auto* smle = app.add_subcommand("smle", "Smoothed MLE on a grid");
  model(smle), input(smle), output(smle), domain(smle), grid(smle);
  smle->add_option("--bandwidth", o.bandwidth, "Bandwidth h");
  cmds.emplace_back(smle, detail::cmd_smle);

  auto* bw = app.add_subcommand("bandwidth", "Smoothed-bootstrap bandwidth selection");
  model(bw), input(bw), output(bw), domain(bw), grid(bw), seed(bw);
  bw->add_option("--pilot", o.pilot, "Pilot bandwidth h0 (default c0 n^{-1/9})");
  bw->add_option("--bootstrap", o.bootstrap, "Bootstrap replications")->capture_default_str();
  bw->add_option("--config", o.config, "Bandwidth plan JSON");
  bw->add_flag("--local", o.local, "Emit the pointwise bandwidth curve as t,bandwidth");
  cmds.emplace_back(bw, detail::cmd_bandwidth);

  auto* ci = app.add_subcommand("ci", "Smoothed-bootstrap confidence band");
  model(ci), input(ci), output(ci), domain(ci), grid(ci), seed(ci);
  ci->add_option("--bandwidth", o.bandwidth, "Bandwidth h");
  ci->add_option("--pilot", o.pilot, "Pilot bandwidth h0");
  ci->add_option("--bootstrap", o.bootstrap, "Bootstrap replications")->capture_default_str();
  ci->add_option("--alpha", o.alpha, "One minus the confidence level")->capture_default_str();
  cmds.emplace_back(ci, detail::cmd_ci);

  auto* fit = app.add_subcommand("fit", "Parametric MLE for incubation data");
  input(fit), output(fit), domain(fit);
  fit->add_option("--family", o.family, "weibull | lognormal")->capture_default_str();
  fit->add_option("--prob", o.probability, "Percentile level reported")->capture_default_str();
  cmds.emplace_back(fit, detail::cmd_fit);

  auto* qu = app.add_subcommand("quantile", "Percentile of the smoothed MLE");
  model(qu), input(qu), output(qu), domain(qu);
  qu->add_option("--bandwidth", o.bandwidth, "Bandwidth h (default c n^{-1/5})");
  qu->add_option("--prob", o.probability, "Percentile level")->capture_default_str();
  cmds.emplace_back(qu, detail::cmd_quantile);

  auto* mean = app.add_subcommand("mean", "Mean of the MLE");
  model(mean), input(mean), output(mean), domain(mean);
  cmds.emplace_back(mean, detail::cmd_mean);

  auto* var = app.add_subcommand("variance", "Asymptotic variance from the adjoint equation");
  output(var), domain(var);
  var->add_option("--functional", o.functional, "mean | smle")->capture_default_str();
  var->add_option("--config", o.config, "Model JSON with truth and exposure");
  var->add_option("--grid-size", o.grid_size, "Cells of the v-grid")->capture_default_str();
  var->add_option("--t", o.at, "Evaluation point (smle)")->capture_default_str();
  var->add_option("--bandwidth", o.bandwidth, "Bandwidth (smle)");
  var->add_option("--n", o.sample_size, "Sample size (smle)")->capture_default_str();
  cmds.emplace_back(var, detail::cmd_variance);

  auto* sim = app.add_subcommand("simulate", "Draw a simulated data set");
  model(sim), output(sim), seed(sim);
  sim->add_option("-n,--size", o.n, "Sample size")->capture_default_str();
  sim->add_option("--config", o.config, "Model JSON with truth, exposure, observation");
  cmds.emplace_back(sim, detail::cmd_simulate);

  auto* exp = app.add_subcommand("experiment", "Run a simulation study from a JSON config");
  output(exp), seed(exp);
  exp->add_option("--config", o.config, "Experiment JSON");
  cmds.emplace_back(exp, detail::cmd_experiment);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return exit_ok;
    }
    err << "usage error: " << e.what() << '\n';
    return exit_usage;
  }

  set_thread_cap(o.threads);
  try {
    for (auto& [sub, fn] : cmds)
      if (sub->parsed())
        fn(o, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return exit_usage;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return exit_data;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return exit_numerical;
  }
  return exit_ok;
}

} // namespace shapefit::cli
