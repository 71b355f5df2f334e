#include "shapefit/functionals.hpp"
#include "shapefit/laws.hpp"

#include <gtest/gtest.h>

using namespace shapefit;

namespace {

const TruthSpec weibull = TruthSpec::incubation_weibull();
auto weibull_cdf = [](double x) { return weibull.cdf(x); };

SmleCurve
identity_curve()
{
  SmleCurve c;
  for (int k = 0; k <= 100; ++k) {
    c.grid.push_back(0.01 * k);
    c.values.push_back(0.01 * k);
  }
  c.bandwidths = { 0.1 };
  c.upper = 1.0;
  return c;
}

} // namespace

TEST(Quantile, IdentityCurve)
{
  const auto c = identity_curve();
  EXPECT_NEAR(smle_quantile(c, 0.5).x, 0.5, 1e-10);
}

TEST(Quantile, InverseConsistency)
{
  const StepDistribution f({ 0.2, 0.5, 0.7, 1.1, 1.6 }, { 0.1, 0.3, 0.2, 0.3, 0.1 });
  const Smoother s(f, 0.4, 2.0);
  for (double p = 0.1; p < 0.95; p += 0.1)
    EXPECT_NEAR(s.cdf(smle_quantile(s, p).x), p, 1e-9);
}

TEST(Quantile, FlagsLevelsOutsideTheRange)
{
  auto c = identity_curve();
  for (auto& v : c.values)
    v = 0.2 + 0.5 * v;
  const auto lo = smle_quantile(c, 0.1);
  EXPECT_TRUE(lo.below_range);
  EXPECT_EQ(lo.x, 0.0);
  const auto hi = smle_quantile(c, 0.9);
  EXPECT_TRUE(hi.above_range);
  EXPECT_EQ(hi.x, 1.0);
  EXPECT_THROW(smle_quantile(c, 0.0), UsageError);
  EXPECT_THROW(smle_quantile(c, 1.0), UsageError);
}

TEST(Quantile, RejectsNonMonotoneCurves)
{
  auto c = identity_curve();
  c.values[50] = 0.9;
  c.bandwidths.assign(c.grid.size(), 0.1);
  try {
    smle_quantile(c, 0.5);
    FAIL() << "expected an exception";
  } catch (const UsageError& e) {
    EXPECT_NE(std::string(e.what()).find("quantile undefined under local bandwidths"),
              std::string::npos);
  }
}

TEST(MeanOfMle, Examples)
{
  EXPECT_DOUBLE_EQ(mean_of_mle(StepDistribution({ 3.0 }, { 1.0 })), 3.0);
  EXPECT_DOUBLE_EQ(mean_of_mle(StepDistribution({ 1.0, 2.0 }, { 0.5, 0.5 })), 1.5);
}

TEST(MeanOfMle, MatchesTheTailIntegral)
{
  const StepDistribution f({ 0.5, 2.25, 3.0, 7.75, 11.0 }, { 0.125, 0.25, 0.25, 0.25, 0.125 });
  double tail = 0.0, prev = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) {
    tail += (1.0 - (j == 0 ? 0.0 : f.cdf_at(j - 1))) * (f.points()[j] - prev);
    prev = f.points()[j];
  }
  EXPECT_NEAR(mean_of_mle(f), tail, 1e-10);
}

TEST(CeConstant, ClosedForm)
{
  auto uniform = [](double x) { return x; };
  EXPECT_NEAR(c_e_constant(uniform, 1.0, { 2.0, 2.0 }, 0.5), 2.0, 1e-12);
}

TEST(CeConstant, MatchesADenseRiemannSum)
{
  const double t0 = 5.0;
  auto integrand = [&](double e) {
    auto F = [](double x) { return x <= 0 ? 0.0 : (x >= 20 ? 1.0 : weibull.cdf(x)); };
    return (1.0 / e) * (1.0 / (F(t0) - F(t0 - e)) + 1.0 / (F(t0 + e) - F(t0))) / 29.0;
  };
  const int nodes = 1000000;
  const double step = 29.0 / nodes;
  double sum = 0.0;
  for (int k = 0; k < nodes; ++k)
    sum += integrand(1.0 + (k + 0.5) * step) * step;
  const double c = c_e_constant(weibull_cdf, 20.0, { 1.0, 30.0 }, t0);
  EXPECT_NEAR(c, sum, 1e-6);
}

TEST(CeConstant, Preconditions)
{
  auto uniform = [](double x) { return x; };
  EXPECT_THROW(c_e_constant(uniform, 1.0, { 0.0, 2.0 }, 0.5), UsageError);
  EXPECT_THROW(c_e_constant(uniform, 1.0, { 1.0, 2.0 }, 1.0), UsageError);
}

TEST(SolvePhi, ZeroRightHandSide)
{
  const auto sol = solve_phi(weibull_cdf, 20.0, { 1.0, 30.0 }, [](double) { return 0.0; }, 100);
  for (double v : sol.values)
    EXPECT_EQ(v, 0.0);
}

TEST(SolvePhi, Linearity)
{
  auto r1 = [](double v) { return std::sin(v / 3.0); };
  auto r2 = [](double v) { return 1.0 + 0.1 * v; };
  auto r12 = [&](double v) { return r1(v) + r2(v); };
  const ExposureLaw fe{ 1.0, 30.0 };
  const auto a = solve_phi(weibull_cdf, 20.0, fe, r1, 120);
  const auto b = solve_phi(weibull_cdf, 20.0, fe, r2, 120);
  const auto c = solve_phi(weibull_cdf, 20.0, fe, r12, 120);
  double scale = 0.0;
  for (double v : c.values)
    scale = std::max(scale, std::abs(v));
  for (std::size_t i = 0; i < c.values.size(); ++i)
    EXPECT_NEAR(c.values[i], a.values[i] + b.values[i], 1e-8 * std::max(1.0, scale));
}

TEST(SolvePhi, MeanProfile)
{
  const ExposureLaw fe{ 1.0, 30.0 };
  auto one = [](double) { return 1.0; };
  const auto coarse = solve_phi(weibull_cdf, 20.0, fe, one, 400);
  const auto fine = solve_phi(weibull_cdf, 20.0, fe, one, 800);
  EXPECT_EQ(coarse.values.front(), 0.0);
  EXPECT_EQ(coarse.values.back(), 0.0);
  EXPECT_LE(coarse.residual, 1e-6 * coarse.rhs_norm);
  for (std::size_t i = 1; i + 1 < coarse.values.size(); ++i)
    EXPECT_LT(coarse.values[i], 0.0);
  EXPECT_LT(std::abs(coarse(10.0) - fine(10.0)), 0.01 * std::abs(fine(10.0)));
}

TEST(SolvePhi, Preconditions)
{
  auto one = [](double) { return 1.0; };
  EXPECT_THROW(solve_phi(weibull_cdf, 20.0, { 0.0, 30.0 }, one, 100), UsageError);
  EXPECT_THROW(solve_phi(weibull_cdf, 20.0, { 1.0, 30.0 }, one, 2), UsageError);
}

TEST(MeanVariance, PositiveStableAndDeterministic)
{
  const ExposureLaw fe{ 1.0, 30.0 };
  const auto a = asymptotic_variance_mean(weibull_cdf, 20.0, fe, 200);
  const auto b = asymptotic_variance_mean(weibull_cdf, 20.0, fe, 200);
  EXPECT_GT(a.sigma2, 0.0);
  EXPECT_EQ(a.sigma2, b.sigma2);
  EXPECT_LT(a.refinement_delta, 0.01);
}

TEST(MeanVariance, WiderExposuresAreMoreInformative)
{
  // soft property: record it, fail only on a gross reversal
  const auto narrow = asymptotic_variance_mean(weibull_cdf, 20.0, { 1.0, 10.0 }, 200);
  const auto wide = asymptotic_variance_mean(weibull_cdf, 20.0, { 1.0, 30.0 }, 200);
  RecordProperty("narrow", std::to_string(narrow.sigma2));
  RecordProperty("wide", std::to_string(wide.sigma2));
  EXPECT_GT(narrow.sigma2, 0.0);
  EXPECT_GT(wide.sigma2, 0.0);
}

TEST(SmleVariance, PositiveAndNeedsInteriorSupport)
{
  const ExposureLaw fe{ 1.0, 30.0 };
  EXPECT_GT(smle_asymptotic_variance(weibull_cdf, 20.0, fe, 8.0, 3.0, 500.0, 200), 0.0);
  EXPECT_THROW(smle_asymptotic_variance(weibull_cdf, 20.0, fe, 2.0, 3.0, 500.0, 200),
               UsageError);
}
