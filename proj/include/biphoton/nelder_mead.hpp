#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace biphoton {

struct NelderMeadOptions {
  std::size_t max_evaluations = 1000;
  double initial_step = 0.1;  // simplex edge, in the units of x
  double value_tol = 1e-12;   // stop when the simplex values spread less than this
  double size_tol = 1e-10;    // ... and its vertices are this close
};

struct NelderMeadResult {
  std::vector<double> x;
  double value;
  std::size_t evaluations;
};

/// Minimizes `f` over the unit box [0, 1]^d. Trial points are projected onto the box.
/// Uses dimension-adaptive coefficients (reflection 1, expansion 1 + 2/d,
/// contraction 0.75 - 1/(2d), shrink 1 - 1/d).
NelderMeadResult nelder_mead_box(const std::function<double(std::span<const double>)>& f,
                                 std::vector<double> start, const NelderMeadOptions& options);

}  // namespace biphoton
