#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <vector>

namespace shapefit {

struct NelderMeadOptions
{
  double ftol = 1e-13;  // relative spread of simplex values
  double xtol = 1e-10;  // simplex diameter
  int max_evals = 20000;
  double initial_step = 0.25;
};

struct NelderMeadResult
{
  std::vector<double> x;
  double value = INFINITY;
  int evals = 0;
  bool converged = false;
};

//! Derivative-free minimization with the standard reflection / expansion /
//! contraction / shrink moves. Non-finite objective values are treated as
//! +infinity.
inline NelderMeadResult
nelder_mead(const std::function<double(const std::vector<double>&)>& objective,
            std::vector<double> start,
            const NelderMeadOptions& opt = {})
{
  const std::size_t dim = start.size();
  int evals = 0;
  auto f = [&](const std::vector<double>& x) {
    ++evals;
    const double v = objective(x);
    return std::isfinite(v) ? v : INFINITY;
  };

  std::vector<std::vector<double>> simplex(dim + 1, start);
  std::vector<double> values(dim + 1);
  for (std::size_t i = 0; i < dim; ++i)
    simplex[i + 1][i] += opt.initial_step;
  for (std::size_t i = 0; i <= dim; ++i)
    values[i] = f(simplex[i]);

  std::vector<std::size_t> order(dim + 1);
  std::vector<double> centroid(dim), trial(dim), trial2(dim);
  bool converged = false;

  while (evals < opt.max_evals) {
    std::iota(order.begin(), order.end(), std::size_t{ 0 });
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second = order[dim - 1];

    double diameter = 0.0;
    for (std::size_t i = 0; i <= dim; ++i)
      for (std::size_t c = 0; c < dim; ++c)
        diameter = std::max(diameter, std::abs(simplex[i][c] - simplex[best][c]));
    const double spread = std::abs(values[worst] - values[best]);
    if (std::isfinite(values[best]) &&
        spread <= opt.ftol * (std::abs(values[best]) + 1e-300) && diameter <= opt.xtol) {
      converged = true;
      break;
    }
    if (std::isfinite(values[best]) && spread == 0.0 && diameter <= opt.xtol) {
      converged = true;
      break;
    }

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i <= dim; ++i)
      if (i != worst)
        for (std::size_t c = 0; c < dim; ++c)
          centroid[c] += simplex[i][c] / static_cast<double>(dim);

    for (std::size_t c = 0; c < dim; ++c)
      trial[c] = centroid[c] + (centroid[c] - simplex[worst][c]);
    const double fr = f(trial);

    if (fr < values[best]) {
      for (std::size_t c = 0; c < dim; ++c)
        trial2[c] = centroid[c] + 2.0 * (centroid[c] - simplex[worst][c]);
      const double fe = f(trial2);
      if (fe < fr) {
        simplex[worst] = trial2;
        values[worst] = fe;
      } else {
        simplex[worst] = trial;
        values[worst] = fr;
      }
      continue;
    }
    if (fr < values[second]) {
      simplex[worst] = trial;
      values[worst] = fr;
      continue;
    }
    const bool outside = fr < values[worst];
    for (std::size_t c = 0; c < dim; ++c)
      trial2[c] = outside ? centroid[c] + 0.5 * (trial[c] - centroid[c])
                          : centroid[c] + 0.5 * (simplex[worst][c] - centroid[c]);
    const double fc = f(trial2);
    if (fc < std::min(fr, values[worst])) {
      simplex[worst] = trial2;
      values[worst] = fc;
      continue;
    }
    // shrink towards the best vertex
    for (std::size_t i = 0; i <= dim; ++i) {
      if (i == best)
        continue;
      for (std::size_t c = 0; c < dim; ++c)
        simplex[i][c] = simplex[best][c] + 0.5 * (simplex[i][c] - simplex[best][c]);
      values[i] = f(simplex[i]);
    }
  }

  const auto best_it = std::min_element(values.begin(), values.end());
  NelderMeadResult result;
  result.x = simplex[static_cast<std::size_t>(best_it - values.begin())];
  result.value = *best_it;
  result.evals = evals;
  result.converged = converged;
  return result;
}

} // namespace shapefit
