#include "oracles.hpp"
#include "shapefit/generators.hpp"
#include "shapefit/incubation.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace shapefit;

namespace {

IncubationData
make(const std::vector<std::pair<double, double>>& es)
{
  IncubationData data;
  for (auto [e, s] : es)
    data.records.push_back({ e, s });
  return data;
}

IncubationData
sample(std::size_t n, std::uint64_t rep, double lo = 1.0)
{
  return gen_incubation(n, TruthSpec::incubation_weibull(), { lo, 30.0 }, 7, rep);
}

} // namespace

TEST(Reduction, Examples)
{
  const auto view = reduce_to_interval_censoring(make({ { 1.0, 0.7 }, { 1.0, 2.3 } }));
  EXPECT_NEAR(view.records[0].t, 0.7, 1e-15);
  EXPECT_EQ(view.records[0].cell, 0u);
  EXPECT_NEAR(view.records[1].t, 0.3, 1e-14);
  EXPECT_EQ(view.records[1].cell, 2u);
}

TEST(Reduction, RoundTripAndRange)
{
  const auto data = sample(2000, 1);
  const auto view = reduce_to_interval_censoring(data);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& r = view.records[i];
    EXPECT_GE(r.t, 0.0);
    EXPECT_LT(r.t, r.e);
    EXPECT_NEAR(r.reconstruct(), data.records[i].s, 1e-12 * data.records[i].s);
  }
}

TEST(Reduction, OffsetsAreUniform)
{
  const auto data = sample(10000, 2);
  const auto view = reduce_to_interval_censoring(data);
  std::vector<double> u;
  for (const auto& r : view.records)
    u.push_back(r.t / r.e);
  std::sort(u.begin(), u.end());
  double d = 0.0;
  const double n = static_cast<double>(u.size());
  for (std::size_t i = 0; i < u.size(); ++i)
    d = std::max({ d, (i + 1) / n - u[i], u[i] - i / n });
  // 1% critical value of the Kolmogorov statistic
  EXPECT_LT(d, 1.628 / std::sqrt(n));
}

TEST(IncubationMle, SingleRecordPutsMassOnItsInterval)
{
  const auto data = make({ { 1.0, 0.7 } });
  const auto f = inc_mle(data);
  EXPECT_NEAR(f.total_mass(), 1.0, 1e-12);
  EXPECT_NEAR(inc_loglik(data, f), 0.0, 1e-12);
  EXPECT_NEAR(f.cdf(0.7), 1.0, 1e-12);
}

TEST(IncubationMle, MatchesBruteForceOnSmallSamples)
{
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> e(0.5, 3.0), s(0.1, 4.0);
  for (int rep = 0; rep < 25; ++rep) {
    IncubationData data;
    const int n = 1 + rep % 4;
    for (int i = 0; i < n; ++i)
      data.records.push_back({ e(gen), s(gen) });
    IcmReport report;
    const auto f = inc_mle(data, IcmOptions{}, &report);
    EXPECT_NEAR(inc_loglik(data, f), oracle::inc_max_loglik(data), 1e-4) << "rep " << rep;
    EXPECT_NEAR(report.loglik, inc_loglik(data, f), 1e-9);
  }
}

TEST(IncubationMle, CertificateBelowTolerance)
{
  for (std::uint64_t rep = 0; rep < 5; ++rep) {
    const auto data = sample(200, rep);
    IcmReport report;
    const auto f = inc_mle(data, IcmOptions{}, &report);
    EXPECT_LE(report.gap.worst(), 1e-8);
    EXPECT_LE(fenchel_gap(f, data).worst(), 1e-7);
  }
}

TEST(IncubationMle, UniformStartViolatesTheCertificate)
{
  const auto data = sample(200, 11);
  std::vector<double> atoms;
  for (const auto& r : data.records)
    atoms.push_back(r.s);
  std::sort(atoms.begin(), atoms.end());
  atoms.erase(std::unique(atoms.begin(), atoms.end()), atoms.end());
  const StepDistribution uniform(atoms,
                                 std::vector<double>(atoms.size(), 1.0 / atoms.size() / (1 + 1e-14)));
  EXPECT_GT(fenchel_gap(uniform, data).worst(), 1e-3);
}

TEST(IncubationMle, PerturbationLowersTheLikelihood)
{
  const auto data = sample(150, 12);
  const auto f = inc_mle(data).compacted();
  const double best = inc_loglik(data, f);
  std::mt19937_64 gen(1);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> m = f.masses();
    std::uniform_int_distribution<std::size_t> pick(0, m.size() - 1);
    const std::size_t a = pick(gen), b = pick(gen);
    if (a == b)
      continue;
    const double move = 0.5 * m[a];
    m[a] -= move;
    m[b] += move;
    EXPECT_LE(inc_loglik(data, StepDistribution(f.points(), m)), best + 1e-9);
  }
}

TEST(IncubationMle, WeightProcessIsNondecreasing)
{
  const auto data = sample(300, 13);
  const auto f = inc_mle(data);
  const auto g = g_process(f, data);
  ASSERT_FALSE(g.values.empty());
  for (std::size_t i = 1; i < g.values.size(); ++i)
    EXPECT_GE(g.values[i], g.values[i - 1]);
  const auto w = w_process(f, data);
  EXPECT_EQ(w.points, g.points);
}

TEST(IncubationMle, StartingPointDoesNotMatter)
{
  const auto data = sample(200, 14);
  IcmReport ra, rb;
  const auto a = inc_mle(data, IcmOptions{}, &ra);
  std::vector<double> atoms;
  for (const auto& r : data.records)
    atoms.push_back(r.s);
  std::sort(atoms.begin(), atoms.end());
  atoms.erase(std::unique(atoms.begin(), atoms.end()), atoms.end());
  std::vector<double> cdf;
  const auto truth = TruthSpec::incubation_weibull();
  for (double x : atoms)
    cdf.push_back(0.02 + 0.96 * truth.cdf(x));
  cdf.back() = 1.0;
  const auto start = StepDistribution::from_cdf(atoms, cdf);
  const auto b = inc_mle(data, IcmOptions{}, &rb, &start);
  EXPECT_NEAR(ra.loglik, rb.loglik, 1e-6);
  for (double x = 0.0; x <= 25.0; x += 0.25)
    EXPECT_NEAR(a.cdf(x), b.cdf(x), 1e-6) << "at " << x;
}

TEST(IncubationMle, TighterToleranceNeverLowersTheLikelihood)
{
  const auto data = sample(200, 15);
  double prev = -std::numeric_limits<double>::infinity();
  for (double tol : { 1e-2, 1e-4, 1e-6, 1e-8, 1e-10 }) {
    IcmOptions opt;
    opt.tol = tol;
    IcmReport report;
    inc_mle(data, opt, &report);
    EXPECT_GE(report.loglik, prev - 1e-12);
    prev = report.loglik;
  }
}

TEST(IncubationMle, ConsistentForTheTruth)
{
  const auto truth = TruthSpec::incubation_weibull();
  const auto f = inc_mle(sample(3000, 16));
  for (double x : { 6.0, 8.0, 10.0, 12.0 })
    EXPECT_NEAR(f.cdf(x), truth.cdf(x), 0.08) << "at " << x;
}

TEST(IncubationMle, RejectsInvalidInput)
{
  EXPECT_THROW(inc_mle(IncubationData{}), UsageError);
  EXPECT_THROW(inc_mle(make({ { 0.0, 1.0 } })), DataError);
  EXPECT_THROW(inc_mle(make({ { 1.0, -1.0 } })), DataError);
  IcmOptions bad;
  bad.tol = 0.0;
  EXPECT_THROW(inc_mle(make({ { 1.0, 1.0 } }), bad), UsageError);
  EXPECT_THROW(make({ { 0.5, 1.0 } }).validate(1.0), DataError);
  EXPECT_THROW(make({ { 1.0, 30.0 } }).validate(std::nullopt, 20.0), DataError);
}
