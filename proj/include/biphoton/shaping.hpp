#pragma once

// Heralded single-photon shaping. Detecting one photon of the |1,1> (or |2,0>) component at
// t_dec in output port 1 leaves the other photon in
//
//   |1,1>:  t^2 f1(t_dec) f2(tau) - r^2 f2(t_dec) f1(tau)     (normalized)
//   |2,0>:  f1(t_dec) f2(tau) + f2(t_dec) f1(tau)             (normalized)
//
// A detector with resolution t_R only localizes the click inside
// (t_dec - t_R/2, t_dec + t_R/2); the heralded photon is then the incoherent mixture of the
// pure shapes over the window, weighted by the detection probability density.

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include <json.hpp>

#include "biphoton/beamsplitter.hpp"

namespace biphoton {

struct HeraldSpec {
  Outcome outcome = Outcome::Out11;
  double t_dec = 0.0;
  double resolution = 0.0;  // t_R; 0 is an ideal point detector
};

struct EnsembleMember {
  double weight;  // normalized
  double t;       // detection sub-time
  TemporalShape shape;
};

struct HeraldResult {
  TemporalShape shape;                        // pure shape at t_dec (or the heaviest member if t_dec itself is dark)
  std::vector<EnsembleMember> ensemble;       // windowed case only
  std::optional<double> success_density;      // ideal detector: probability density at t_dec
  std::optional<double> success_probability;  // windowed detector: probability of a click in the window
  std::optional<double> fidelity;             // against the target, when one was given
};

/// Heraldings whose unnormalized norm falls at or below this are impossible.
inline constexpr double kImpossibleHerald = 1e-12;

/// Ideal (t_R = 0) heralding. Only Out11 and Out20 are valid outcomes.
/// success_density is P11 int |F11(t_dec, tau)|^2 dtau, or 2 P20 int |F20(t_dec, tau)|^2 dtau.
HeraldResult herald_shape(const TemporalShape& f1, const TemporalShape& f2, const BeamSplitter& bs,
                          const HeraldSpec& spec, const TimeGrid& grid,
                          const std::optional<TemporalShape>& target = std::nullopt);

/// |<target|shape>|^2 on the grid.
double shaping_fidelity(const TemporalShape& shape, const TemporalShape& target, const TimeGrid& grid);

/// Finite-resolution heralding. The window is split into K = max(16, ceil(t_R / dtau))
/// equal cells sampled at their midpoints. Falls back to herald_shape when t_R = 0.
HeraldResult herald_windowed(const TemporalShape& f1, const TemporalShape& f2, const BeamSplitter& bs,
                             const HeraldSpec& spec, const TimeGrid& grid,
                             const std::optional<TemporalShape>& target = std::nullopt);

/// Heralded shape of two ED photons detuned by +-dw/2 on a balanced splitter, detected at
/// t_dec = 0: an ED-sine shape with linewidth gamma and frequency dw/2.
TemporalShape ed_to_edsine_closed_form(double gamma, double delta_omega);

/// x = {G1, G2, w1, w2, t, tau0, t_dec}.
struct ShapingParameters {
  double gamma1;
  double gamma2;
  double omega1;
  double omega2;
  double t;
  double tau0;
  double t_dec;

  static constexpr std::size_t kSize = 7;
  std::array<double, kSize> to_array() const { return {gamma1, gamma2, omega1, omega2, t, tau0, t_dec}; }
  static ShapingParameters from_array(const std::array<double, kSize>& a) {
    return {a[0], a[1], a[2], a[3], a[4], a[5], a[6]};
  }
};

struct Interval {
  double lo;
  double hi;
};

/// Defaults are in units of a unit-width target (tau_width = 1). Linewidths are searched on
/// a logarithmic scale, everything else linearly.
struct ShapingBounds {
  Interval gamma1{0.05, 10.0};
  Interval gamma2{0.05, 10.0};
  Interval omega1{-5.0, 5.0};
  Interval omega2{-5.0, 5.0};
  Interval t{0.05, 0.95};
  Interval tau0{-5.0, 5.0};
  Interval t_dec{0.0, 5.0};
  double min_abs_omega = 0.05;  // |w| is pushed out of (-min_abs_omega, min_abs_omega)

  std::array<Interval, ShapingParameters::kSize> as_array() const {
    return {gamma1, gamma2, omega1, omega2, t, tau0, t_dec};
  }
  /// Throws InvalidArgument for non-finite, empty or physically invalid intervals.
  void validate() const;
};

using InputFamily = std::function<std::pair<TemporalShape, TemporalShape>(const ShapingParameters&)>;

/// Two ED-sine photons starting at tau = 0: (G1, w1) and (G2, w2).
std::pair<TemporalShape, TemporalShape> edsine_pair(const ShapingParameters& x);

struct ShapingProblem {
  TemporalShape target = TemporalShape::gaussian(1.0);  // tau0 from x replaces its delay/start
  ShapingBounds bounds;
  TimeGrid grid{-10.0, 30.0, 2001};
  InputFamily family = edsine_pair;
};

/// Target with its time reference moved to tau0 (Gaussian delay, ED/ED-sine start).
TemporalShape shifted_target(const TemporalShape& target, double tau0);

/// F_shaping(x) for the Out11 herald. Throws on infeasible x.
double shaping_objective(const ShapingProblem& problem, const ShapingParameters& x);

struct OptimizerConfig {
  std::size_t budget = 5000;  // total objective evaluations
  std::size_t restarts = 8;
  std::uint64_t seed = 1;
};

struct RestartSummary {
  std::array<double, ShapingParameters::kSize> start;
  double fidelity;  // NaN if no feasible start was found
  std::size_t evaluations;
};

struct ShapingOutcome {
  ShapingParameters x_best;
  double fidelity;
  std::size_t evaluations;
  HeraldResult herald;
  std::vector<RestartSummary> restarts;
};

/// Bounded Nelder-Mead from `restarts` scrambled-Halton starting points, each with an equal
/// share of the budget. Deterministic in (problem, config); ties go to the lowest restart.
/// Throws NoFeasibleStartError when no restart finds a feasible starting point.
ShapingOutcome optimize_shaping(const ShapingProblem& problem, const OptimizerConfig& config);

nlohmann::json parameters_to_json(const ShapingParameters& x);
ShapingParameters parameters_from_json(const nlohmann::json& j);
nlohmann::json bounds_to_json(const ShapingBounds& b);
/// Keys missing from `j` keep the defaults in `base`.
ShapingBounds bounds_from_json(const nlohmann::json& j, ShapingBounds base = {});

}  // namespace biphoton
