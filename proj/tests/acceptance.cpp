// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include "oracles.hpp"
#include "shapefit/shapefit.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

using namespace shapefit;

namespace {

struct Outcome
{
  bool pass;
  std::string detail;
};

int failures = 0;

void
criterion(const std::string& name, const std::function<Outcome()>& body)
{
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = { false, std::string("exception: ") + e.what() };
  }
  const double secs =
    std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%s %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(),
              secs);
  std::fflush(stdout);
  if (!o.pass)
    ++failures;
}

template<typename... Args>
std::string
fmt(Args&&... args)
{
  std::ostringstream s;
  s.precision(6);
  (s << ... << args);
  return s.str();
}

std::vector<double>
interior_grid()
{
  return config::make_grid(0.02, 1.98, 0.02);
}

Outcome
brute_force()
{
  std::mt19937_64 gen(2024);
  double worst = 0.0;
  std::uniform_int_distribution<int> size_cs(1, 6), bit(0, 1), size_inc(1, 5);
  std::uniform_real_distribution<double> time(0.05, 2.0), expo(0.5, 3.0), symp(0.1, 4.0);
  for (int rep = 0; rep < 50; ++rep) {
    CurrentStatusData data;
    const int n = size_cs(gen);
    for (int i = 0; i < n; ++i)
      data.records.push_back({ time(gen), bit(gen) });
    worst = std::max(worst, oracle::cs_max_loglik(data) - cs_loglik(data, cs_mle(data)));
  }
  const double worst_cs = worst;
  worst = 0.0;
  for (int rep = 0; rep < 25; ++rep) {
    IncubationData data;
    const int n = size_inc(gen);
    for (int i = 0; i < n; ++i)
      data.records.push_back({ expo(gen), symp(gen) });
    worst = std::max(worst, oracle::inc_max_loglik(data) - inc_loglik(data, inc_mle(data)));
  }
  return { worst_cs <= 1e-4 && worst <= 1e-4,
           fmt("oracle excess loglik: current status ", worst_cs, ", incubation ", worst) };
}

Outcome
fenchel()
{
  double worst = 0.0, worst_comp = 0.0;
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t n = rep % 2 ? 100 : 50;
    const auto data =
      gen_incubation(n, TruthSpec::incubation_weibull(), { 1.0, 30.0 }, 77, rep);
    IcmReport report;
    inc_mle(data, IcmOptions{}, &report);
    worst = std::max(worst, report.gap.worst());
    worst_comp = std::max(worst_comp, report.gap.complementarity);
  }
  return { worst <= 1e-8 && worst_comp <= 1e-8,
           fmt("max certificate ", worst, ", max |int W dF| ", worst_comp) };
}

Outcome
percentile()
{
  ExperimentConfig cfg; // n=500, N=200, E ~ U[0,30], h = 6 n^{-1/5}
  const auto table = experiment_percentile(cfg);
  const double truth = 10.17716;
  const auto np = table.summary.at("nonparametric");
  const auto wb = table.summary.at("weibull");
  const auto ln = table.summary.at("lognormal");
  const bool ok = std::abs(np.median - truth) <= 0.5 && wb.iqr() < np.iqr() &&
                  std::abs(ln.median - truth) > 0.5;
  return { ok, fmt("median np ", np.median, " (iqr ", np.iqr(), "), weibull ", wb.median,
                   " (iqr ", wb.iqr(), "), lognormal ", ln.median) };
}

Outcome
coverage()
{
  CoverageConfig c;
  c.replications = 300;
  c.grid = interior_grid();
  const auto res = coverage_experiment(c);
  const double mean = res.mean_over(c.h(), c.domain - c.h());
  return { mean >= 0.02 && mean <= 0.09 && res.failures == 0,
           fmt("mean interior non-coverage ", mean, " over [", c.h(), ", ", c.domain - c.h(),
               "], failures ", res.failures) };
}

Outcome
bandwidth()
{
  const std::size_t n = 1000;
  const auto data =
    gen_current_status(n, TruthSpec::truncated_exponential(2.0), { 0.0, 2.0 }, 1);
  const auto grid = interior_grid();
  const auto plan = BandwidthPlan::current_status();
  const auto crit = bandwidth_criterion(data, grid, plan);
  const double c = crit.constants[crit.argmin_global()];
  bool local_ok = true;
  double lo = 1e300, hi = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double h = crit.bandwidths[crit.argmin_local(k)];
    local_ok = local_ok && std::isfinite(h) && h > 0.0;
    lo = std::min(lo, h);
    hi = std::max(hi, h);
  }
  return { c >= 1.0 && c <= 3.0 && local_ok,
           fmt("global constant ", c, ", local bandwidths in [", lo, ", ", hi, "]") };
}

Outcome
integral_equation()
{
  const TruthSpec truth = TruthSpec::incubation_weibull();
  auto F = [&](double x) { return truth.cdf(x); };
  const ExposureLaw fe{ 1.0, 30.0 };
  const auto rep = asymptotic_variance_mean(F, truth.upper, fe, 400);

  const std::size_t n = 5000;
  const int reps = 300;
  std::vector<double> z(reps);
  const double mu = truth.mean();
  parallel_for(reps, [&](std::size_t r) {
    const auto data = gen_incubation(n, truth, fe, 303, r);
    z[r] = std::sqrt(static_cast<double>(n)) *
           (mean_of_mle(inc_mle(data).truncated_to(truth.upper)) - mu);
  });
  const double mc = sample_variance(z);
  const double ratio = mc / rep.sigma2;
  const bool ok = rep.residual <= 1e-6 && rep.sigma2 > 0.0 && rep.refinement_delta < 0.01 &&
                  ratio >= 1.0 / 1.5 && ratio <= 1.5;
  return { ok, fmt("sigma2 ", rep.sigma2, ", residual ", rep.residual, ", refinement ",
                   rep.refinement_delta, ", Monte Carlo ", mc, " (ratio ", ratio, ")") };
}

Outcome
rate()
{
  const auto truth = TruthSpec::truncated_exponential(2.0);
  const double t0 = 1.0;
  auto iqr_at = [&](std::size_t n) {
    std::vector<double> z(400);
    parallel_for(z.size(), [&](std::size_t r) {
      const auto f = cs_mle(gen_current_status(n, truth, { 0.0, 2.0 }, 88, r));
      z[r] = std::cbrt(static_cast<double>(n)) * (f.cdf(t0) - truth.cdf(t0));
    });
    return quartiles(z).iqr();
  };
  const double a = iqr_at(1000), b = iqr_at(8000);
  const double ratio = std::max(a, b) / std::min(a, b);
  return { ratio < 1.5, fmt("IQR n=1000 ", a, ", n=8000 ", b, " (ratio ", ratio, ")") };
}

Outcome
properties()
{
  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);

  // convex minorant slopes equal the weighted antitonic fit
  double gcm_gap = 0.0;
  for (int rep = 0; rep < 200; ++rep) {
    const int n = 1 + rep % 40;
    std::vector<double> x, y, v, w;
    double cx = 0.0, cy = 0.0;
    for (int i = 0; i < n; ++i) {
      w.push_back(0.1 + u(gen));
      v.push_back(u(gen));
      cx += w.back();
      cy += w.back() * v.back();
      x.push_back(cx);
      y.push_back(cy);
    }
    const auto s = gcm_slopes(x, y);
    const auto p = pava_weighted(v, w);
    for (int i = 0; i < n; ++i)
      gcm_gap = std::max(gcm_gap, std::abs(s[i] - p[i]));
  }

  // smoother boundary values
  bool boundary_ok = true;
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<double> pts, ms;
    const int m = 1 + rep % 12;
    double total = 0.0;
    for (int j = 0; j < m; ++j) {
      pts.push_back(2.0 * (j + u(gen)) / m);
      ms.push_back(u(gen) + 0.01);
      total += ms.back();
    }
    for (auto& v : ms)
      v /= total * (1 + 1e-15);
    const Smoother s(StepDistribution(pts, ms), 0.05 + u(gen), 2.0);
    boundary_ok = boundary_ok && s.cdf(0.0) == 0.0 && s.cdf(2.0) == 1.0;
  }

  // band determinism under a fixed seed
  const auto data =
    gen_current_status(300, TruthSpec::truncated_exponential(2.0), { 0.0, 2.0 }, 5);
  const std::vector<double> g{ 0.5, 1.0, 1.5 };
  const auto b1 = cs_ci_studentized(data, g, 0.5, 0.8, 200, 0.05, 11);
  const auto b2 = cs_ci_studentized(data, g, 0.5, 0.8, 200, 0.05, 11);
  const bool band_ok = b1.lower == b2.lower && b1.upper == b2.upper;

  // reduction round trip
  const auto inc = gen_incubation(5000, TruthSpec::incubation_weibull(), { 1.0, 30.0 }, 6);
  const auto view = reduce_to_interval_censoring(inc);
  std::size_t inexact = 0;
  for (std::size_t i = 0; i < inc.size(); ++i)
    if (view.records[i].reconstruct() != inc.records[i].s)
      ++inexact;

  // kernel axioms
  using boost::math::quadrature::gauss_kronrod;
  auto K = [](double x) { return TriweightKernel::density(x); };
  const double mass = gauss_kronrod<double, 31>::integrate(K, -1.0, 1.0);
  const double m1 = gauss_kronrod<double, 31>::integrate([&](double x) { return x * K(x); }, -1.0, 1.0);
  const double m2 =
    gauss_kronrod<double, 31>::integrate([&](double x) { return x * x * K(x); }, -1.0, 1.0);
  const bool kernel_ok = std::abs(mass - 1.0) < 1e-13 && std::abs(m1) < 1e-13 &&
                         std::abs(m2 - 1.0 / 9.0) < 1e-13 && K(1.0) == 0.0 && K(-1.5) == 0.0;

  const bool ok = gcm_gap <= 1e-12 && boundary_ok && band_ok && inexact == 0 && kernel_ok;
  return { ok, fmt("gcm/pava gap ", gcm_gap, ", boundary ", boundary_ok ? "exact" : "inexact",
                   ", band ", band_ok ? "deterministic" : "nondeterministic", ", inexact reductions ",
                   inexact, ", kernel ", kernel_ok ? "ok" : "bad") };
}

} // namespace

int
main()
{
  criterion("brute-force MLE equivalence", brute_force);
  criterion("Fenchel certificate", fenchel);
  criterion("percentile reproduction", percentile);
  criterion("coverage at desk scale", coverage);
  criterion("bandwidth selector sanity", bandwidth);
  criterion("integral-equation solver", integral_equation);
  criterion("rate sanity", rate);
  criterion("property suites", properties);
  std::printf("%d failure(s)\n", failures);
  return failures == 0 ? 0 : 1;
}
