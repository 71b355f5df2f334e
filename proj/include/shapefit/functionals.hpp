#pragma once

#include "shapefit/error.hpp"
#include "shapefit/kernel.hpp"
#include "shapefit/laws.hpp"
#include "shapefit/log.hpp"
#include "shapefit/smle.hpp"
#include "shapefit/step_distribution.hpp"

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

namespace shapefit {

// --------------------------------------------------------------------------
// Quantiles

struct QuantileResult
{
  double x;
  bool below_range = false; // p under the curve's minimum; x is the left end
  bool above_range = false; // p over the curve's maximum; x is the right end
};

//! Solves cdf(x) = p on [lo, hi] by bisection to `xtol` for a
//! nondecreasing callable.
template<typename Cdf>
QuantileResult
quantile_by_bisection(Cdf&& cdf, double lo, double hi, double p, double xtol = 1e-10)
{
  if (!(p > 0.0 && p < 1.0))
    throw UsageError("quantile level must lie in (0,1)");
  if (cdf(lo) >= p)
    return { lo, cdf(lo) > p, false };
  if (cdf(hi) < p)
    return { hi, false, true };
  while (hi - lo > xtol) {
    const double mid = 0.5 * (lo + hi);
    (cdf(mid) < p ? lo : hi) = mid;
  }
  return { 0.5 * (lo + hi) };
}

//! Quantile of a smoothed cdf tabulated on a grid (linear interpolation
//! between grid points). Rejects curves that are not monotone, which can
//! happen with locally chosen bandwidths.
inline QuantileResult
smle_quantile(const SmleCurve& curve, double p)
{
  if (curve.grid.size() < 2)
    throw UsageError("quantile needs at least two grid points");
  if (!curve.monotone())
    throw UsageError("quantile undefined under local bandwidths: curve is not monotone");
  const auto& g = curve.grid;
  const auto& v = curve.values;
  auto interp = [&](double x) {
    auto it = std::upper_bound(g.begin(), g.end(), x);
    if (it == g.begin())
      return v.front();
    if (it == g.end())
      return v.back();
    const std::size_t j = static_cast<std::size_t>(it - g.begin());
    const double th = (x - g[j - 1]) / (g[j] - g[j - 1]);
    return v[j - 1] + th * (v[j] - v[j - 1]);
  };
  return quantile_by_bisection(interp, g.front(), g.back(), p);
}

//! Quantile of the continuous SMLE on its whole domain.
inline QuantileResult
smle_quantile(const Smoother& smle, double p)
{
  return quantile_by_bisection([&](double x) { return smle.cdf(x); }, 0.0, smle.upper(), p);
}

// --------------------------------------------------------------------------
// Mean functional

//! sum_j x_j m_j. Warns when the distribution is defective.
inline double
mean_of_mle(const StepDistribution& f)
{
  const double mass = f.total_mass();
  if (std::abs(mass - 1.0) > 1e-8)
    log::warn("mean of a defective distribution: missing mass ", 1.0 - mass);
  double mean = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j)
    mean += f.points()[j] * f.masses()[j];
  return mean;
}

// --------------------------------------------------------------------------
// Limit constant of the pointwise MLE

namespace detail {

template<typename Cdf>
auto
clamp_cdf(Cdf&& cdf, double upper)
{
  return [cdf = std::forward<Cdf>(cdf), upper](double x) {
    if (x <= 0.0)
      return 0.0;
    if (x >= upper)
      return 1.0;
    return static_cast<double>(cdf(x));
  };
}

} // namespace detail

//! c_E = int e^-1 [1/(F0(t0)-F0(t0-e)) + 1/(F0(t0+e)-F0(t0))] dF_E(e), with
//! F0 taken as 0 below 0 and 1 above `upper`.
template<typename Cdf>
double
c_e_constant(Cdf&& f0, double upper, const ExposureLaw& exposure, double t0)
{
  exposure.validate();
  const auto F = detail::clamp_cdf(f0, upper);
  const double at = F(t0);
  if (!(at > 0.0 && at < 1.0))
    throw UsageError("F0(t0) must lie in (0,1)");
  if (!(exposure.lo > 0.0))
    throw UsageError("separation condition violated: exposure law charges 0");
  auto integrand = [&](double e) {
    const double left = at - F(t0 - e);
    const double right = F(t0 + e) - at;
    if (!(left > 0.0) || !(right > 0.0))
      throw NumericalError("separation condition violated: zero denominator");
    return (1.0 / left + 1.0 / right) / e;
  };
  if (exposure.degenerate())
    return integrand(exposure.lo);

  // split at the kinks e = t0 and e = upper - t0
  std::vector<double> cuts{ exposure.lo };
  for (double k : { t0, upper - t0 })
    if (k > exposure.lo && k < exposure.hi)
      cuts.push_back(k);
  cuts.push_back(exposure.hi);
  std::sort(cuts.begin(), cuts.end());
  using boost::math::quadrature::gauss_kronrod;
  double total = 0.0;
  for (std::size_t i = 1; i < cuts.size(); ++i) {
    double err = 0.0;
    total += gauss_kronrod<double, 31>::integrate(integrand, cuts[i - 1], cuts[i], 20,
                                                  1e-13, &err);
  }
  return total / (exposure.hi - exposure.lo);
}

// --------------------------------------------------------------------------
// Adjoint integral equation

//! Discrete solution of
//!   int e^-1 [ (phi(v+e)-phi(v))/(F(v+e)-F(v)) - (phi(v)-phi(v-e))/(F(v)-F(v-e)) ] dF_E(e)
//!     = rhs(v),   v in (0, upper),
//! with phi = 0 outside (0, upper).
struct PhiSolution
{
  std::vector<double> grid;   // uniform, includes both endpoints
  std::vector<double> values; // values[0] = values.back() = 0
  double residual = 0.0;      // sup-norm of the discrete operator residual
  double rhs_norm = 0.0;      // sup |rhs| on the interior grid
  double rcond = 0.0;         // reciprocal condition estimate of the system

  double operator()(double x) const
  {
    if (x <= grid.front() || x >= grid.back())
      return 0.0;
    const double step = grid[1] - grid[0];
    const double pos = (x - grid.front()) / step;
    const std::size_t j = std::min(static_cast<std::size_t>(pos), grid.size() - 2);
    const double th = pos - static_cast<double>(j);
    return (1.0 - th) * values[j] + th * values[j + 1];
  }

  //! Trapezoidal integral of phi over the domain.
  double integral() const
  {
    const double step = grid[1] - grid[0];
    double s = 0.0;
    for (std::size_t i = 1; i + 1 < values.size(); ++i)
      s += values[i];
    return step * (s + 0.5 * (values.front() + values.back()));
  }
};

struct PhiOptions
{
  int exposure_nodes = 200; // trapezoid nodes in e
  double residual_tol = 1e-6; // relative to sup |rhs|
};

template<typename Cdf, typename Rhs>
PhiSolution
solve_phi(Cdf&& f,
          double upper,
          const ExposureLaw& exposure,
          Rhs&& rhs,
          int grid_size,
          const PhiOptions& opt = {})
{
  exposure.validate();
  if (!(exposure.lo > 0.0))
    throw UsageError("separation condition violated: exposure law charges 0");
  if (grid_size < 3)
    throw UsageError("grid size must be at least 3");
  if (!(upper > 0.0))
    throw UsageError("support bound must be positive");
  const auto F = detail::clamp_cdf(f, upper);

  // quadrature in e against dF_E
  std::vector<double> enode, eweight;
  if (exposure.degenerate() || opt.exposure_nodes < 2) {
    enode.push_back(exposure.lo);
    eweight.push_back(1.0);
  } else {
    const int q = opt.exposure_nodes;
    const double de = (exposure.hi - exposure.lo) / (q - 1);
    for (int i = 0; i < q; ++i) {
      enode.push_back(exposure.lo + i * de);
      const double w = (i == 0 || i == q - 1) ? 0.5 : 1.0;
      eweight.push_back(w * de / (exposure.hi - exposure.lo));
    }
  }

  const int n = grid_size;
  const double step = upper / n;
  const int unknowns = n - 1;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(unknowns, unknowns);
  Eigen::VectorXd b(unknowns);

  // adds c * phi(x) into row r, phi linear between grid nodes and 0 outside
  auto add = [&](int r, double x, double c) {
    if (x <= 0.0 || x >= upper)
      return;
    const double pos = x / step;
    int j = static_cast<int>(std::floor(pos));
    const double th = pos - j;
    if (j >= 1 && j <= unknowns)
      a(r, j - 1) += c * (1.0 - th);
    if (th > 0.0 && j + 1 >= 1 && j + 1 <= unknowns)
      a(r, j) += c * th;
  };

  for (int i = 1; i <= unknowns; ++i) {
    const int r = i - 1;
    const double v = i * step;
    const double fv = F(v);
    for (std::size_t q = 0; q < enode.size(); ++q) {
      const double e = enode[q];
      const double w = eweight[q] / e;
      const double up = F(v + e) - fv;
      const double down = fv - F(v - e);
      if (!(up > 0.0) || !(down > 0.0))
        throw NumericalError("separation condition violated: zero denominator at v=" +
                             std::to_string(v));
      add(r, v + e, w / up);
      a(r, r) -= w / up + w / down;
      add(r, v - e, w / down);
    }
    b(r) = rhs(v);
  }

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  const double rcond = lu.rcond();
  if (!(rcond > 1e-15))
    throw NumericalError("singular integral-equation system, rcond " + std::to_string(rcond));
  Eigen::VectorXd x = lu.solve(b);
  // one step of iterative refinement
  x += lu.solve(b - a * x);
  const Eigen::VectorXd res = a * x - b;

  PhiSolution sol;
  sol.rcond = rcond;
  sol.rhs_norm = b.size() ? b.cwiseAbs().maxCoeff() : 0.0;
  sol.residual = res.size() ? res.cwiseAbs().maxCoeff() : 0.0;
  sol.grid.resize(n + 1);
  sol.values.assign(n + 1, 0.0);
  for (int i = 0; i <= n; ++i)
    sol.grid[i] = i * step;
  for (int i = 1; i <= unknowns; ++i)
    sol.values[i] = x(i - 1);
  if (sol.residual > opt.residual_tol * sol.rhs_norm && sol.residual > 0.0)
    throw NumericalError("integral-equation residual " + std::to_string(sol.residual) +
                         " above tolerance");
  return sol;
}

struct VarianceReport
{
  double sigma2 = 0.0;
  int grid_size = 0;
  double refinement_delta = 0.0; // relative change when the grid is doubled
  double residual = 0.0;
};

//! Asymptotic variance of the MLE of the mean: -int_0^upper phi(x) dx, with
//! phi solving the adjoint equation for right-hand side 1.
template<typename Cdf>
VarianceReport
asymptotic_variance_mean(Cdf&& f,
                         double upper,
                         const ExposureLaw& exposure,
                         int grid_size,
                         const PhiOptions& opt = {})
{
  auto one = [](double) { return 1.0; };
  const PhiSolution coarse = solve_phi(f, upper, exposure, one, grid_size, opt);
  const PhiSolution fine = solve_phi(f, upper, exposure, one, 2 * grid_size, opt);
  VarianceReport rep;
  rep.sigma2 = -coarse.integral();
  rep.grid_size = grid_size;
  rep.residual = coarse.residual;
  const double refined = -fine.integral();
  rep.refinement_delta = std::abs(refined - rep.sigma2) / std::abs(refined);
  if (!(rep.sigma2 > 0.0))
    throw NumericalError("nonpositive asymptotic variance " + std::to_string(rep.sigma2));
  return rep;
}

//! Asymptotic variance of n^{2/5}(SMLE(t) - F0(t)):
//! n^{-1/5} int phi(y) K_h(t-y) dy with phi solving the adjoint equation for
//! right-hand side -K_h(t - v).
template<typename Cdf>
double
smle_asymptotic_variance(Cdf&& f0,
                         double upper,
                         const ExposureLaw& exposure,
                         double t,
                         double h,
                         double n,
                         int grid_size,
                         const PhiOptions& opt = {})
{
  if (!(h > 0.0))
    throw UsageError("bandwidth must be positive");
  if (!(t - h > 0.0 && t + h < upper))
    throw UsageError("kernel support must lie inside the domain");
  auto rhs = [&](double v) { return -kernel_h(t - v, h); };
  const PhiSolution phi = solve_phi(f0, upper, exposure, rhs, grid_size, opt);
  using boost::math::quadrature::gauss_kronrod;
  auto integrand = [&](double y) { return phi(y) * kernel_h(t - y, h); };
  const double integral =
    gauss_kronrod<double, 31>::integrate(integrand, t - h, t + h, 20, 1e-12);
  const double sigma2 = std::pow(n, -0.2) * integral;
  if (!(sigma2 > 0.0))
    throw NumericalError("nonpositive asymptotic variance");
  return sigma2;
}

} // namespace shapefit
