#include "oracles.hpp"
#include "shapefit/kernel.hpp"
#include "shapefit/smle.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include <random>

using namespace shapefit;
using boost::math::quadrature::gauss_kronrod;

namespace {

StepDistribution
random_distribution(std::mt19937_64& gen, int atoms, double lo, double hi)
{
  std::uniform_real_distribution<double> u(lo, hi), w(0.1, 1.0);
  std::vector<double> p(atoms), m(atoms);
  for (auto& x : p)
    x = u(gen);
  std::sort(p.begin(), p.end());
  double total = 0.0;
  for (auto& x : m)
    total += (x = w(gen));
  for (auto& x : m)
    x /= total * (1.0 + 1e-15);
  return StepDistribution(p, m);
}

} // namespace

TEST(Kernel, CentreAndEdges)
{
  const auto c = kernel_eval(0.0);
  EXPECT_DOUBLE_EQ(c.density, 35.0 / 32.0);
  EXPECT_DOUBLE_EQ(c.integrated, 0.5);
  const auto e = kernel_eval(1.0);
  EXPECT_DOUBLE_EQ(e.density, 0.0);
  EXPECT_DOUBLE_EQ(e.integrated, 1.0);
  EXPECT_DOUBLE_EQ(kernel_eval(-1.0).integrated, 0.0);
  EXPECT_DOUBLE_EQ(kernel_eval(3.0).integrated, 1.0);
  EXPECT_DOUBLE_EQ(kernel_eval(-3.0).integrated, 0.0);
  EXPECT_DOUBLE_EQ(kernel_eval(-3.0).density, 0.0);
}

TEST(Kernel, AxiomsByQuadrature)
{
  auto k = [](double u) { return TriweightKernel::density(u); };
  EXPECT_NEAR((gauss_kronrod<double, 31>::integrate(k, -1.0, 1.0)), 1.0, 1e-14);
  auto m2 = [](double u) { return u * u * TriweightKernel::density(u); };
  EXPECT_NEAR((gauss_kronrod<double, 31>::integrate(m2, -1.0, 1.0)), 1.0 / 9.0, 1e-14);
  EXPECT_NEAR(TriweightKernel::second_moment, 1.0 / 9.0, 1e-15);
  auto sq = [](double u) { return std::pow(TriweightKernel::density(u), 2); };
  EXPECT_NEAR((gauss_kronrod<double, 31>::integrate(sq, -1.0, 1.0)), TriweightKernel::roughness,
              1e-14);
  for (double u = -1.0; u <= 1.0; u += 0.01) {
    EXPECT_GE(TriweightKernel::density(u), 0.0);
    EXPECT_NEAR(TriweightKernel::density(u), TriweightKernel::density(-u), 1e-15);
    const double ik = gauss_kronrod<double, 31>::integrate(k, -1.0, u);
    EXPECT_NEAR(TriweightKernel::integrated(u), ik, 1e-13);
  }
}

TEST(Kernel, DerivativesMatchFiniteDifferences)
{
  for (double u = -0.95; u < 0.95; u += 0.05) {
    const double d = 1e-6;
    EXPECT_NEAR(TriweightKernel::derivative(u),
                (TriweightKernel::density(u + d) - TriweightKernel::density(u - d)) / (2 * d),
                1e-7);
    EXPECT_NEAR(TriweightKernel::second_derivative(u),
                (TriweightKernel::derivative(u + d) - TriweightKernel::derivative(u - d)) /
                  (2 * d),
                1e-6);
  }
}

TEST(Smle, PointMassInterior)
{
  const StepDistribution f({ 1.0 }, { 1.0 });
  EXPECT_DOUBLE_EQ(smle_eval(f, 0.3, 1.3, 2.0), 1.0);
  EXPECT_DOUBLE_EQ(smle_eval(f, 0.3, 1.0, 2.0), 0.5);
  EXPECT_DOUBLE_EQ(smle_eval(f, 0.3, 0.7, 2.0), 0.0);
}

TEST(Smle, RejectsBadArguments)
{
  const StepDistribution f({ 1.0 }, { 1.0 });
  EXPECT_THROW(smle_eval(f, 0.0, 1.0, 2.0), UsageError);
  EXPECT_THROW(smle_eval(f, -0.1, 1.0, 2.0), UsageError);
  EXPECT_THROW(smle_eval(f, 0.3, -0.1, 2.0), UsageError);
  EXPECT_THROW(smle_eval(f, 0.3, 2.1, 2.0), UsageError);
  EXPECT_THROW(smle_eval(f, 2.5, 1.0, 2.0), UsageError);
  const StepDistribution outside({ 3.0 }, { 1.0 });
  EXPECT_THROW(smle_eval(outside, 0.3, 1.0, 2.0), UsageError);
}

TEST(Smle, BoundaryValuesAreExact)
{
  std::mt19937_64 gen(5);
  for (int rep = 0; rep < 200; ++rep) {
    const auto f = random_distribution(gen, 1 + rep % 17, 0.0, 2.0);
    for (double h : { 0.05, 0.3, 1.0, 2.0 }) {
      const Smoother s(f, h, 2.0);
      EXPECT_EQ(s.cdf(0.0), 0.0);
      EXPECT_EQ(s.cdf(2.0), 1.0);
    }
  }
}

TEST(Smle, MatchesConvolutionQuadratureInTheInterior)
{
  std::mt19937_64 gen(9);
  const auto f = random_distribution(gen, 10, 0.0, 2.0);
  const double h = 0.4;
  for (double t = h; t <= 2.0 - h + 1e-12; t += 0.05)
    EXPECT_NEAR(smle_eval(f, h, t, 2.0), oracle::smoothed_cdf_by_quadrature(f, h, t), 1e-8);
}

TEST(Smle, ReflectionFormsNearTheBoundaries)
{
  std::mt19937_64 gen(10);
  const auto f = random_distribution(gen, 12, 0.0, 2.0);
  const double h = 0.5, M = 2.0;
  for (double t = 0.0; t < h; t += 0.05) {
    double v = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j)
      v += f.masses()[j] * (integrated_kernel_h(t - f.points()[j], h) -
                            integrated_kernel_h(-t - f.points()[j], h));
    EXPECT_NEAR(smle_eval(f, h, t, M), std::clamp(v, 0.0, 1.0), 1e-12);
  }
  for (double t = M - h + 0.01; t <= M; t += 0.05) {
    double v = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j)
      v += f.masses()[j] * (integrated_kernel_h(t - f.points()[j], h) + 1.0 -
                            integrated_kernel_h(2 * M - t - f.points()[j], h));
    EXPECT_NEAR(smle_eval(f, h, t, M), std::clamp(v, 0.0, 1.0), 1e-12);
  }
}

TEST(Smle, GlobalBandwidthCurveIsMonotone)
{
  std::mt19937_64 gen(12);
  std::vector<double> grid;
  for (int k = 0; k <= 200; ++k)
    grid.push_back(0.01 * k);
  for (int rep = 0; rep < 50; ++rep) {
    const auto f = random_distribution(gen, 30, 0.0, 2.0);
    const auto curve = smle_curve(f, 0.1 + 0.02 * rep, grid, 2.0);
    EXPECT_TRUE(curve.monotone());
    EXPECT_TRUE(curve.global_bandwidth());
    for (double v : curve.values) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

TEST(Smle, DensityIsTheDerivative)
{
  std::mt19937_64 gen(13);
  const auto f = random_distribution(gen, 15, 0.0, 2.0);
  const Smoother s(f, 0.45, 2.0);
  for (double t = 0.01; t < 1.99; t += 0.07) {
    const double d = 1e-6;
    EXPECT_NEAR(s.density(t), (s.cdf(t + d) - s.cdf(t - d)) / (2 * d), 1e-5);
  }
}

TEST(Smle, DefectiveMassGoesToTheUpperEnd)
{
  const StepDistribution f({ 0.5 }, { 0.6 });
  const Smoother s(f, 0.2, 2.0);
  EXPECT_NEAR(s.cdf(1.0), 0.6, 1e-15);
  EXPECT_EQ(s.cdf(2.0), 1.0);
}

TEST(Smle, LocalCurveKeepsBandwidths)
{
  std::mt19937_64 gen(14);
  const auto f = random_distribution(gen, 8, 0.0, 2.0);
  const std::vector<double> grid{ 0.5, 1.0, 1.5 }, h{ 0.2, 0.3, 0.4 };
  const auto curve = smle_curve_local(f, h, grid, 2.0);
  EXPECT_FALSE(curve.global_bandwidth());
  for (int k = 0; k < 3; ++k)
    EXPECT_DOUBLE_EQ(curve.values[k], smle_eval(f, h[k], grid[k], 2.0));
  EXPECT_THROW(smle_curve_local(f, std::vector<double>{ 0.2 }, grid, 2.0), UsageError);
}

TEST(Smle, SmoothOfSmoothMatchesQuadrature)
{
  std::mt19937_64 gen(15);
  const auto f = random_distribution(gen, 10, 0.0, 2.0);
  const Smoother pilot(f, 0.6, 2.0);
  const double h = 0.3;
  for (double t : { 0.5, 1.0, 1.5 }) {
    auto integrand = [&](double y) { return kernel_h(t - y, h) * pilot.cdf(y); };
    const double ref = gauss_kronrod<double, 61>::integrate(integrand, t - h, t + h, 15, 1e-14);
    EXPECT_NEAR(smooth_of_smooth(pilot, h, t), ref, 1e-9);
  }
}
