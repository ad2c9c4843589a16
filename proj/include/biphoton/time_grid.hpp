#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace biphoton {

using cplx = std::complex<double>;

/// Uniform discretization of [t_min, t_max] with n_points nodes (endpoints included).
/// Times are dimensionless, in units of an inverse linewidth.
class TimeGrid {
 public:
  TimeGrid(double t_min, double t_max, std::size_t n_points);

  double t_min() const noexcept { return t_min_; }
  double t_max() const noexcept { return t_max_; }
  std::size_t size() const noexcept { return n_; }
  double spacing() const noexcept { return dt_; }

  double at(std::size_t i) const noexcept {
    // last node is pinned so the window end is hit exactly
    return i + 1 == n_ ? t_max_ : t_min_ + static_cast<double>(i) * dt_;
  }

  bool contains(double t) const noexcept { return t >= t_min_ && t <= t_max_; }

  /// Trapezoid weight of node i (dt at interior nodes, dt/2 at both ends).
  double weight(std::size_t i) const noexcept { return (i == 0 || i + 1 == n_) ? 0.5 * dt_ : dt_; }

  std::vector<double> nodes() const;

  /// Trapezoid rule for sum_i w_i x_i conj(y_i).
  cplx inner(std::span<const cplx> x, std::span<const cplx> y) const;
  /// Trapezoid rule for sum_i w_i |x_i|^2.
  double norm_sq(std::span<const cplx> x) const;
  double integrate(std::span<const double> values) const;

  friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

 private:
  double t_min_;
  double t_max_;
  std::size_t n_;
  double dt_;
};

}  // namespace biphoton
