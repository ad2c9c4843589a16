#include "biphoton/waveforms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "biphoton/errors.hpp"

namespace biphoton {
namespace {

void require_positive(double v, const char* what) {
  if (!std::isfinite(v) || !(v > 0.0)) throw InvalidArgument(std::string(what) + " must be finite and > 0");
}

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw InvalidArgument(std::string(what) + " must be finite");
}

double edsine_norm_factor(double gamma, double omega) {
  return std::sqrt(gamma * (4.0 * omega * omega + gamma * gamma) / (2.0 * omega * omega));
}

// Antiderivative of N^2 exp(-G u) sin^2(w u), zero at u -> infinity.
double edsine_antiderivative(double gamma, double omega, double u) {
  const double n2 = gamma * (4.0 * omega * omega + gamma * gamma) / (2.0 * omega * omega);
  const double e = std::exp(-gamma * u);
  const double c = std::cos(2.0 * omega * u), s = std::sin(2.0 * omega * u);
  return n2 * (-e / (2.0 * gamma) -
               0.5 * e * (-gamma * c + 2.0 * omega * s) / (gamma * gamma + 4.0 * omega * omega));
}

cplx eval_sampled(const Sampled& s, double tau) {
  if (!s.grid.contains(tau)) return {0.0, 0.0};
  const double pos = (tau - s.grid.t_min()) / s.grid.spacing();
  const auto i = std::min(static_cast<std::size_t>(pos), s.grid.size() - 2);
  const double frac = std::clamp(pos - static_cast<double>(i), 0.0, 1.0);
  return (1.0 - frac) * s.values[i] + frac * s.values[i + 1];
}

}  // namespace

TemporalShape TemporalShape::exp_decay(double gamma, double detuning, double start) {
  require_positive(gamma, "exp_decay gamma");
  require_finite(detuning, "exp_decay detuning");
  require_finite(start, "exp_decay start");
  return TemporalShape(ExpDecay{gamma, detuning, start});
}

TemporalShape TemporalShape::exp_decay_sine(double gamma, double omega, double start) {
  require_positive(gamma, "exp_decay_sine gamma");
  require_finite(omega, "exp_decay_sine omega");
  require_finite(start, "exp_decay_sine start");
  if (omega == 0.0) throw InvalidArgument("exp_decay_sine omega must be nonzero");
  return TemporalShape(ExpDecaySine{gamma, omega, start});
}

TemporalShape TemporalShape::gaussian(double width, double delay) {
  require_positive(width, "gaussian width");
  require_finite(delay, "gaussian delay");
  return TemporalShape(Gaussian{width, delay});
}

TemporalShape TemporalShape::from_samples(TimeGrid grid, std::vector<cplx> values) {
  if (values.size() != grid.size()) throw InvalidArgument("sampled shape: value count does not match grid");
  for (const cplx& v : values)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw InvalidArgument("sampled shape: non-finite sample");
  const double n2 = grid.norm_sq(values);
  if (!(n2 > 0.0)) throw InvalidArgument("sampled shape: zero norm");
  const double inv = 1.0 / std::sqrt(n2);
  for (cplx& v : values) v *= inv;
  return TemporalShape(Sampled{grid, std::move(values)});
}

cplx TemporalShape::operator()(double tau) const {
  return std::visit(
      [tau](const auto& p) -> cplx {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, ExpDecay>) {
          const double u = tau - p.start;
          if (u < 0.0) return {0.0, 0.0};
          // -i (dw - i G) u / 2 = -G u / 2 - i dw u / 2
          return std::sqrt(p.gamma) * std::exp(cplx(-0.5 * p.gamma * u, -0.5 * p.detuning * u));
        } else if constexpr (std::is_same_v<T, ExpDecaySine>) {
          const double u = tau - p.start;
          if (u < 0.0) return {0.0, 0.0};
          return edsine_norm_factor(p.gamma, p.omega) * std::exp(-0.5 * p.gamma * u) *
                 std::sin(p.omega * u);
        } else if constexpr (std::is_same_v<T, Gaussian>) {
          const double d = (tau - p.delay) * p.width;
          return std::sqrt(p.width / std::sqrt(std::numbers::pi)) * std::exp(-0.5 * d * d);
        } else {
          return eval_sampled(p, tau);
        }
      },
      *params_);
}

double captured_norm(const TemporalShape& shape, double a, double b) {
  if (!(b > a)) return 0.0;
  return std::visit(
      [a, b](const auto& p) -> double {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, ExpDecay>) {
          const double lo = std::max(a, p.start);
          if (b <= lo) return 0.0;
          return std::exp(-p.gamma * (lo - p.start)) - std::exp(-p.gamma * (b - p.start));
        } else if constexpr (std::is_same_v<T, ExpDecaySine>) {
          const double lo = std::max(a, p.start);
          if (b <= lo) return 0.0;
          return edsine_antiderivative(p.gamma, p.omega, b - p.start) -
                 edsine_antiderivative(p.gamma, p.omega, lo - p.start);
        } else if constexpr (std::is_same_v<T, Gaussian>) {
          const double upper_tail = 0.5 * std::erfc(p.width * (b - p.delay));
          const double lower_tail = 0.5 * std::erfc(p.width * (p.delay - a));
          return 1.0 - upper_tail - lower_tail;
        } else {
          const TimeGrid& g = p.grid;
          double acc = 0.0;
          for (std::size_t i = 0; i + 1 < g.size(); ++i) {
            const double l = std::max(a, g.at(i)), r = std::min(b, g.at(i + 1));
            if (r <= l) continue;
            // trapezoid on the clipped piece of the linear interpolant
            acc += 0.5 * (r - l) * (std::norm(eval_sampled(p, l)) + std::norm(eval_sampled(p, r)));
          }
          return acc;
        }
      },
      shape.params());
}

Sampling sample(const TemporalShape& shape, const TimeGrid& grid) {
  std::vector<cplx> values(grid.size());
  if (const Sampled* s = shape.samples(); s && s->grid == grid) {
    values = s->values;
  } else {
    for (std::size_t i = 0; i < grid.size(); ++i) values[i] = shape(grid.at(i));
  }

  const double captured = captured_norm(shape, grid.t_min(), grid.t_max());
  if (!(captured >= 0.99))
    throw CoverageError("time grid [" + std::to_string(grid.t_min()) + ", " + std::to_string(grid.t_max()) +
                        "] captures only " + std::to_string(captured) + " of the shape norm");

  const double n2 = grid.norm_sq(values);
  if (!(n2 > 0.0)) throw CoverageError("shape vanishes on every grid node");
  const double scale = 1.0 / std::sqrt(n2);
  for (cplx& v : values) v *= scale;
  return Sampling{TemporalShape::from_samples(grid, std::move(values)), captured, scale};
}

cplx overlap_J(const TemporalShape& f1, const TemporalShape& f2, const TimeGrid& grid) {
  const Sampling s1 = sample(f1, grid);
  const Sampling s2 = sample(f2, grid);
  return normalized_inner(grid, s1.shape.samples()->values, s2.shape.samples()->values);
}

cplx normalized_inner(const TimeGrid& grid, std::span<const cplx> a, std::span<const cplx> b) {
  // All three sums take the same path, so identical inputs give exactly 1.
  const double aa = grid.inner(a, a).real(), bb = grid.inner(b, b).real();
  return grid.inner(a, b) / std::sqrt(aa * bb);
}

}  // namespace biphoton
