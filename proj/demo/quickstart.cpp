// Simulates current status and incubation samples, then prints the MLE,
// the smoothed MLE with a bootstrap-selected bandwidth, a confidence band
// and a smoothed percentile estimate.
#include "shapefit/bandwidth.hpp"
#include "shapefit/confidence.hpp"
#include "shapefit/functionals.hpp"
#include "shapefit/generators.hpp"
#include "shapefit/parametric.hpp"

#include <cmath>
#include <cstdio>
#include <vector>

int
main()
{
  using namespace shapefit;

  const auto truth = TruthSpec::truncated_exponential(2.0);
  const auto cs = gen_current_status(1000, truth, ObservationLaw{ 0.0, 2.0 }, 7);
  const auto mle = cs_mle(cs);
  std::printf("current status: n = %zu, MLE has %zu jumps\n", cs.size(), mle.size());

  std::vector<double> grid;
  for (int k = 1; k < 20; ++k)
    grid.push_back(0.1 * k);
  BandwidthPlan plan = BandwidthPlan::current_status();
  plan.B = 200;
  const double h = select_bandwidth_global(cs, grid, plan);
  const double h0 = plan.pilot_bandwidth(cs.size());
  std::printf("selected bandwidth h = %.4f (pilot h0 = %.4f)\n", h, h0);

  const auto band = cs_ci_studentized(cs, grid, h, h0, 500, 0.05, 11);
  std::printf("%6s %9s %9s %9s %9s\n", "t", "lower", "SMLE", "upper", "F0");
  for (std::size_t k = 0; k < grid.size(); k += 3)
    std::printf("%6.2f %9.4f %9.4f %9.4f %9.4f\n", grid[k], band.lower[k], band.estimate[k],
                band.upper[k], truth.cdf(grid[k]));

  const auto weibull = TruthSpec::incubation_weibull();
  const auto inc = gen_incubation(500, weibull, ExposureLaw{ 0.0, 30.0 }, 3);
  IcmReport report;
  const auto f = inc_mle(inc, {}, &report).truncated_to(20.0);
  const Smoother smle(f, 6.0 * std::pow(500.0, -0.2), 20.0);
  std::printf("\nincubation: ICM iterations %d, certificate %.2e\n", report.iterations,
              report.gap.worst());
  std::printf("95th percentile: SMLE %.3f, Weibull fit %.3f, truth %.3f\n",
              smle_quantile(smle, 0.95).x,
              fit_parametric(inc, ParametricFamily::weibull).quantile(0.95),
              weibull.quantile(0.95));
  std::printf("mean: MLE %.3f, truth %.3f\n", mean_of_mle(f), weibull.mean());
  return 0;
}
