#include "biphoton/time_grid.hpp"

#include <cmath>

#include "biphoton/errors.hpp"
#include "biphoton/simd/kernels.hpp"

namespace biphoton {

TimeGrid::TimeGrid(double t_min, double t_max, std::size_t n_points)
    : t_min_(t_min), t_max_(t_max), n_(n_points) {
  if (!std::isfinite(t_min) || !std::isfinite(t_max) || !(t_max > t_min))
    throw InvalidArgument("time grid requires finite t_min < t_max");
  if (n_points < 2) throw InvalidArgument("time grid requires at least 2 points");
  dt_ = (t_max - t_min) / static_cast<double>(n_points - 1);
}

std::vector<double> TimeGrid::nodes() const {
  std::vector<double> out(n_);
  for (std::size_t i = 0; i < n_; ++i) out[i] = at(i);
  return out;
}

cplx TimeGrid::inner(std::span<const cplx> x, std::span<const cplx> y) const {
  if (x.size() != n_ || y.size() != n_) throw InvalidArgument("sample count does not match grid");
  const cplx sum = simd::dot_conj(x, y);
  const cplx ends = 0.5 * (x.front() * std::conj(y.front()) + x.back() * std::conj(y.back()));
  return dt_ * (sum - ends);
}

double TimeGrid::norm_sq(std::span<const cplx> x) const {
  if (x.size() != n_) throw InvalidArgument("sample count does not match grid");
  const double sum = simd::norm_sq(x);
  const double ends = 0.5 * (std::norm(x.front()) + std::norm(x.back()));
  return dt_ * (sum - ends);
}

double TimeGrid::integrate(std::span<const double> values) const {
  if (values.size() != n_) throw InvalidArgument("sample count does not match grid");
  double sum = 0.0;
  for (std::size_t i = 0; i < n_; ++i) sum += weight(i) * values[i];
  return sum;
}

}  // namespace biphoton
