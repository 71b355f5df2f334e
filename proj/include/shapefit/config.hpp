#pragma once

#include "shapefit/bandwidth.hpp"
#include "shapefit/confidence.hpp"
#include "shapefit/error.hpp"
#include "shapefit/laws.hpp"
#include "shapefit/sim.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace shapefit::config {

using json = nlohmann::json;

//! Inclusive uniform grid a, a + step, ..., up to b.
inline std::vector<double>
make_grid(double a, double b, double step)
{
  if (!(step > 0.0) || !(b >= a))
    throw UsageError("grid needs step > 0 and b >= a");
  const auto count = static_cast<long>(std::floor((b - a) / step + 1e-9)) + 1;
  std::vector<double> g;
  for (long k = 0; k < count; ++k)
    g.push_back(a + static_cast<double>(k) * step);
  return g;
}

//! Grid from "a:b:step".
inline std::vector<double>
parse_grid(const std::string& spec)
{
  const auto c1 = spec.find(':');
  const auto c2 = c1 == std::string::npos ? c1 : spec.find(':', c1 + 1);
  if (c2 == std::string::npos)
    throw UsageError("grid must have the form a:b:step");
  double a, b, step;
  try {
    a = std::stod(spec.substr(0, c1));
    b = std::stod(spec.substr(c1 + 1, c2 - c1 - 1));
    step = std::stod(spec.substr(c2 + 1));
  } catch (const std::exception&) {
    throw UsageError("grid must have the form a:b:step");
  }
  return make_grid(a, b, step);
}

namespace detail {

inline void
check_keys(const json& j, std::string_view where, std::initializer_list<std::string_view> allowed)
{
  if (!j.is_object())
    throw UsageError("schema: " + std::string(where) + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (auto a : allowed)
      ok = ok || it.key() == a;
    if (!ok)
      throw UsageError("schema: unknown key '" + it.key() + "' in " + std::string(where));
  }
}

template<typename T>
void
read(const json& j, const char* key, T& out, std::string_view where)
{
  if (!j.contains(key))
    return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw UsageError("schema: wrong type for '" + std::string(key) + "' in " +
                     std::string(where));
  }
}

inline std::vector<double>
read_grid(const json& j)
{
  if (j.is_string())
    return parse_grid(j.get<std::string>());
  if (j.is_array()) {
    try {
      return j.get<std::vector<double>>();
    } catch (const json::exception&) {
      throw UsageError("schema: grid array must hold numbers");
    }
  }
  check_keys(j, "grid", { "from", "to", "step" });
  double a = 0, b = 0, s = 0;
  read(j, "from", a, "grid");
  read(j, "to", b, "grid");
  read(j, "step", s, "grid");
  return make_grid(a, b, s);
}

} // namespace detail

inline UniformLaw
uniform_law_from_json(const json& j, std::string_view where)
{
  detail::check_keys(j, where, { "lo", "hi" });
  UniformLaw law;
  detail::read(j, "lo", law.lo, where);
  detail::read(j, "hi", law.hi, where);
  law.validate();
  return law;
}

inline TruthSpec
truth_from_json(const json& j)
{
  detail::check_keys(j, "truth", { "family", "alpha", "beta", "upper", "location" });
  std::string family = "truncated-weibull";
  detail::read(j, "family", family, "truth");
  TruthSpec t;
  t.family = parse_truth_family(family);
  if (t.family == TruthFamily::truncated_weibull)
    t = TruthSpec::incubation_weibull();
  detail::read(j, "alpha", t.alpha, "truth");
  detail::read(j, "beta", t.beta, "truth");
  detail::read(j, "upper", t.upper, "truth");
  detail::read(j, "location", t.location, "truth");
  if (!(t.upper > 0.0))
    throw UsageError("schema: truth upper bound must be positive");
  return t;
}

inline BandwidthPlan
plan_from_json(const json& j, BandwidthPlan plan)
{
  detail::check_keys(j, "bandwidth plan", { "c0", "c_grid", "B", "seed", "targets", "domain" });
  detail::read(j, "c0", plan.c0, "bandwidth plan");
  detail::read(j, "c_grid", plan.c_grid, "bandwidth plan");
  detail::read(j, "B", plan.B, "bandwidth plan");
  detail::read(j, "seed", plan.seed, "bandwidth plan");
  detail::read(j, "domain", plan.domain, "bandwidth plan");
  if (j.contains("targets"))
    plan.targets = detail::read_grid(j.at("targets"));
  plan.validate();
  return plan;
}

//! Parsed experiment file: the incubation experiments use `experiment`,
//! the coverage study uses `coverage`.
struct ExperimentFile
{
  ExperimentKind kind = ExperimentKind::percentile;
  ExperimentConfig experiment;
  CoverageConfig coverage;
};

inline ExperimentFile
experiment_from_json(const json& j)
{
  detail::check_keys(j, "experiment config",
                     { "experiment", "truth", "exposure", "observation", "n", "replications",
                       "bandwidth_constant", "pilot_constant", "probability", "domain", "seed",
                       "output", "grid", "bootstrap", "alpha", "icm_tol" });
  ExperimentFile f;
  std::string kind = "percentile";
  detail::read(j, "experiment", kind, "experiment config");
  f.kind = parse_experiment_kind(kind);
  const char* where = "experiment config";
  if (f.kind == ExperimentKind::coverage) {
    CoverageConfig& c = f.coverage;
    if (j.contains("truth"))
      c.truth = truth_from_json(j.at("truth"));
    if (j.contains("observation"))
      c.observation = uniform_law_from_json(j.at("observation"), "observation");
    if (j.contains("exposure"))
      throw UsageError("schema: coverage experiments take 'observation', not 'exposure'");
    detail::read(j, "n", c.n, where);
    detail::read(j, "replications", c.replications, where);
    detail::read(j, "bandwidth_constant", c.h_constant, where);
    detail::read(j, "pilot_constant", c.h0_constant, where);
    detail::read(j, "bootstrap", c.B, where);
    detail::read(j, "alpha", c.alpha, where);
    detail::read(j, "seed", c.seed, where);
    detail::read(j, "domain", c.domain, where);
    c.grid = j.contains("grid") ? detail::read_grid(j.at("grid")) : parse_grid("0.02:1.98:0.02");
    detail::read(j, "output", f.experiment.output, where);
    return f;
  }
  ExperimentConfig& e = f.experiment;
  e.kind = f.kind;
  if (j.contains("truth"))
    e.truth = truth_from_json(j.at("truth"));
  if (j.contains("exposure"))
    e.exposure = uniform_law_from_json(j.at("exposure"), "exposure");
  if (j.contains("observation"))
    throw UsageError("schema: incubation experiments take 'exposure', not 'observation'");
  detail::read(j, "n", e.n, where);
  detail::read(j, "replications", e.replications, where);
  detail::read(j, "bandwidth_constant", e.bandwidth_constant, where);
  detail::read(j, "probability", e.probability, where);
  detail::read(j, "domain", e.domain, where);
  detail::read(j, "seed", e.seed, where);
  detail::read(j, "output", e.output, where);
  detail::read(j, "icm_tol", e.icm.tol, where);
  e.validate();
  return f;
}

inline json
load_json(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw DataError("cannot open config file '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw UsageError(std::string("schema: config is not valid JSON: ") + e.what());
  }
}

} // namespace shapefit::config
