#pragma once

// Single-photon temporal wavepackets f(tau) with unit L2 norm.
//
//   ExpDecay      sqrt(G) exp(-i (dw - iG) u / 2),                      u = tau - start >= 0
//   ExpDecaySine  sqrt(G (4 w^2 + G^2) / (2 w^2)) exp(-G u / 2) sin(w u), u = tau - start >= 0
//   Gaussian      sqrt(G / sqrt(pi)) exp(-(tau - tau0)^2 G^2 / 2)
//   Sampled       linear interpolation of normalized grid samples, zero outside the grid
//
// ExpDecay carries its own detuning; a pair detuned by +dw/2 and -dw/2 (relative
// detuning dw) is exp_decay(G, +dw) and exp_decay(G, -dw).

#include <memory>
#include <span>
#include <variant>
#include <vector>

#include "biphoton/time_grid.hpp"

namespace biphoton {

struct ExpDecay {
  double gamma;
  double detuning = 0.0;
  double start = 0.0;
};

struct ExpDecaySine {
  double gamma;
  double omega;
  double start = 0.0;
};

struct Gaussian {
  double width;
  double delay = 0.0;
};

struct Sampled {
  TimeGrid grid;
  std::vector<cplx> values;
};

enum class ShapeKind { ExpDecay, ExpDecaySine, Gaussian, Sampled };

class TemporalShape {
 public:
  using Params = std::variant<ExpDecay, ExpDecaySine, Gaussian, Sampled>;

  static TemporalShape exp_decay(double gamma, double detuning = 0.0, double start = 0.0);
  static TemporalShape exp_decay_sine(double gamma, double omega, double start = 0.0);
  static TemporalShape gaussian(double width, double delay = 0.0);
  /// Normalizes the samples under the grid's trapezoid rule.
  static TemporalShape from_samples(TimeGrid grid, std::vector<cplx> values);

  ShapeKind kind() const noexcept { return static_cast<ShapeKind>(params_->index()); }
  const Params& params() const noexcept { return *params_; }

  cplx operator()(double tau) const;

  /// Non-null only for Sampled shapes.
  const Sampled* samples() const noexcept { return std::get_if<Sampled>(params_.get()); }

 private:
  explicit TemporalShape(Params p) : params_(std::make_shared<const Params>(std::move(p))) {}
  std::shared_ptr<const Params> params_;
};

inline cplx eval(const TemporalShape& shape, double tau) { return shape(tau); }

/// Exact norm fraction of an analytic shape inside [a, b]; for Sampled shapes the
/// trapezoid norm of the part of the sample grid inside [a, b].
double captured_norm(const TemporalShape& shape, double a, double b);

struct Sampling {
  TemporalShape shape;   // Sampled, unit trapezoid norm on the grid
  double captured_norm;  // before renormalization
  double scale;          // factor applied to eval() to produce the stored samples
  bool low_coverage() const noexcept { return captured_norm < 1.0 - 1e-6; }
};

/// Samples `shape` on `grid` and renormalizes. Throws CoverageError below 0.99 captured norm.
Sampling sample(const TemporalShape& shape, const TimeGrid& grid);

/// Indistinguishability factor J = int f1(tau) conj(f2(tau)) dtau (trapezoid on `grid`).
/// <a|b> / (|a| |b|) with trapezoid weights.
cplx normalized_inner(const TimeGrid& grid, std::span<const cplx> a, std::span<const cplx> b);

cplx overlap_J(const TemporalShape& f1, const TemporalShape& f2, const TimeGrid& grid);

}  // namespace biphoton
