#include "biphoton/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "biphoton/errors.hpp"

namespace biphoton {

NelderMeadResult nelder_mead_box(const std::function<double(std::span<const double>)>& f,
                                 std::vector<double> start, const NelderMeadOptions& options) {
  const std::size_t d = start.size();
  if (d == 0) throw InvalidArgument("Nelder-Mead needs at least one dimension");
  const double nd = static_cast<double>(d);
  const double alpha = 1.0, beta = 1.0 + 2.0 / nd, gamma = 0.75 - 0.5 / nd, delta = 1.0 - 1.0 / nd;

  std::size_t evals = 0;
  auto evaluate = [&](std::vector<double>& x) {
    for (double& v : x) v = std::clamp(v, 0.0, 1.0);
    ++evals;
    const double y = f(x);
    return std::isfinite(y) ? y : std::numeric_limits<double>::infinity();
  };

  std::vector<std::vector<double>> simplex(d + 1, start);
  for (std::size_t i = 0; i < d; ++i) {
    double& v = simplex[i + 1][i];
    v = (v + options.initial_step <= 1.0) ? v + options.initial_step : v - options.initial_step;
  }
  std::vector<double> values(d + 1);
  for (std::size_t i = 0; i <= d && evals < options.max_evaluations; ++i) values[i] = evaluate(simplex[i]);
  if (evals < d + 1) {
    // budget smaller than the simplex: report the best vertex evaluated so far
    const auto best = std::min_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(evals));
    return {simplex[static_cast<std::size_t>(best - values.begin())], *best, evals};
  }

  std::vector<std::size_t> order(d + 1);
  std::vector<double> centroid(d), trial(d), trial2(d);
  while (evals < options.max_evaluations) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    const std::size_t best = order.front(), worst = order.back(), second = order[d - 1];

    double size = 0.0;
    for (std::size_t i = 0; i <= d; ++i)
      for (std::size_t k = 0; k < d; ++k) size = std::max(size, std::abs(simplex[i][k] - simplex[best][k]));
    if (values[worst] - values[best] <= options.value_tol && size <= options.size_tol) break;
    if (size <= options.size_tol * 1e-3) break;

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i : order)
      if (i != worst)
        for (std::size_t k = 0; k < d; ++k) centroid[k] += simplex[i][k] / nd;

    for (std::size_t k = 0; k < d; ++k) trial[k] = centroid[k] + alpha * (centroid[k] - simplex[worst][k]);
    const double fr = evaluate(trial);

    if (fr < values[best]) {
      for (std::size_t k = 0; k < d; ++k) trial2[k] = centroid[k] + beta * (trial[k] - centroid[k]);
      const double fe = evals < options.max_evaluations ? evaluate(trial2) : fr + 1.0;
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
    if (evals >= options.max_evaluations) break;

    const bool outside = fr < values[worst];
    for (std::size_t k = 0; k < d; ++k)
      trial2[k] = outside ? centroid[k] + gamma * (trial[k] - centroid[k])
                          : centroid[k] - gamma * (centroid[k] - simplex[worst][k]);
    const double fc = evaluate(trial2);
    if (fc < (outside ? fr : values[worst])) {
      simplex[worst] = trial2;
      values[worst] = fc;
      continue;
    }

    for (std::size_t i = 0; i <= d; ++i) {
      if (i == best) continue;
      if (evals >= options.max_evaluations) break;
      for (std::size_t k = 0; k < d; ++k)
        simplex[i][k] = simplex[best][k] + delta * (simplex[i][k] - simplex[best][k]);
      values[i] = evaluate(simplex[i]);
    }
  }

  const auto best = static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
  return {simplex[best], values[best], evals};
}

}  // namespace biphoton
