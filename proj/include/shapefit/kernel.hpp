#pragma once

#include <cmath>

namespace shapefit {

//! Triweight kernel K(u) = 35/32 (1-u^2)^3 on [-1,1] and its integral.
//!
//! Two continuous derivatives, which the pilot second-derivative estimate
//! relies on.
struct TriweightKernel
{
  static constexpr double second_moment = 1.0 / 9.0;
  static constexpr double roughness = 350.0 / 429.0; // int K^2

  static double density(double u)
  {
    if (u <= -1.0 || u >= 1.0)
      return 0.0;
    const double v = 1.0 - u * u;
    return 35.0 / 32.0 * v * v * v;
  }

  static double integrated(double u)
  {
    if (u <= -1.0)
      return 0.0;
    if (u >= 1.0)
      return 1.0;
    const double u2 = u * u;
    // u - u^3 + 3u^5/5 - u^7/7
    const double poly = u * (1.0 + u2 * (-1.0 + u2 * (0.6 - u2 / 7.0)));
    return 0.5 + 35.0 / 32.0 * poly;
  }

  static double derivative(double u)
  {
    if (u <= -1.0 || u >= 1.0)
      return 0.0;
    const double v = 1.0 - u * u;
    return -105.0 / 16.0 * u * v * v;
  }

  static double second_derivative(double u)
  {
    if (u <= -1.0 || u >= 1.0)
      return 0.0;
    return -105.0 / 16.0 * (1.0 - u * u) * (1.0 - 5.0 * u * u);
  }
};

struct KernelValue
{
  double density;
  double integrated;
};

inline KernelValue
kernel_eval(double u)
{
  return { TriweightKernel::density(u), TriweightKernel::integrated(u) };
}

//! Scaled kernel K_h(u) = K(u/h)/h.
inline double
kernel_h(double u, double h)
{
  return TriweightKernel::density(u / h) / h;
}

//! Integrated kernel IK_h(u) = IK(u/h).
inline double
integrated_kernel_h(double u, double h)
{
  return TriweightKernel::integrated(u / h);
}

} // namespace shapefit
