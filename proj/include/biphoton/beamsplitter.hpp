#pragma once

// Two single photons f1 (port 1) and f2 (port 2) through a lossless beam splitter
// with real scattering matrix [[t, r], [-r, t]].
//
//   P20 = P02 = t^2 r^2 (1 + |J|^2)
//   P11       = t^4 + r^4 - 2 t^2 r^2 |J|^2
//   F11(t1, t2) = [t^2 f1(t1) f2(t2) - r^2 f2(t1) f1(t2)] / sqrt(P11)
//   F20(t1, t2) = -F02(t1, t2) = r t [f1(t1) f2(t2) + f2(t1) f1(t2)] / sqrt(P20)

#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "biphoton/waveforms.hpp"

namespace biphoton {

class BeamSplitter {
 public:
  /// Amplitude transmission t in [0, 1]; r = sqrt(1 - t^2).
  explicit BeamSplitter(double t);
  static BeamSplitter from_t_sq(double t_sq);

  double t() const noexcept { return t_; }
  double r() const noexcept { return r_; }
  double t_sq() const noexcept { return t_ * t_; }
  double r_sq() const noexcept { return 1.0 - t_ * t_; }

 private:
  double t_;
  double r_;
};

/// t^2 - r^2: 0 for a balanced splitter, +-1 when only one pathway exists.
double path_indistinguishability(const BeamSplitter& bs);

enum class Outcome { Out20, Out11, Out02 };

std::string_view outcome_name(Outcome o);  // "20", "11", "02"
Outcome outcome_from_name(std::string_view name);

struct OutcomeProbabilities {
  double p20;
  double p11;
  double p02;
  double J_abs;
  double of(Outcome o) const noexcept;
};

/// P20 = P02 = t^2 r^2 (1 + |J|^2), P11 = t^4 + r^4 - 2 t^2 r^2 |J|^2.
OutcomeProbabilities outcome_probabilities(double J_abs, const BeamSplitter& bs);
/// Computes J on `grid` first.
OutcomeProbabilities outcome_probabilities(const TemporalShape& f1, const TemporalShape& f2,
                                           const BeamSplitter& bs, const TimeGrid& grid);

/// Probability below which an outcome's amplitude is not normalized.
inline constexpr double kDegenerateProbability = 1e-12;

/// Normalized joint temporal amplitude, row-major: value(i, j) = F(tau_i, tau_j).
class TwoPhotonAmplitude {
 public:
  TwoPhotonAmplitude(Outcome outcome, TimeGrid grid, std::vector<cplx> values, double probability);

  Outcome outcome() const noexcept { return outcome_; }
  const TimeGrid& grid() const noexcept { return grid_; }
  double probability() const noexcept { return probability_; }
  std::size_t size() const noexcept { return grid_.size(); }

  cplx operator()(std::size_t i, std::size_t j) const noexcept { return values_[i * size() + j]; }
  std::span<const cplx> row(std::size_t i) const noexcept { return {values_.data() + i * size(), size()}; }
  std::span<const cplx> values() const noexcept { return values_; }

  /// Trapezoid double integral of |F|^2.
  double norm_sq() const;

 private:
  Outcome outcome_;
  TimeGrid grid_;
  std::vector<cplx> values_;
  double probability_;
};

/// Throws DegenerateOutcomeError when the outcome probability is <= 1e-12.
TwoPhotonAmplitude joint_amplitude(const TemporalShape& f1, const TemporalShape& f2, const BeamSplitter& bs,
                                   Outcome outcome, const TimeGrid& grid);

/// Unnormalized numerator of F on the grid (F * sqrt(P)), row-major. For |2,0> and |0,2> this is
/// rt [f1 f2 + f2 f1] / sqrt(2), so its squared norm is the outcome probability.
std::vector<cplx> joint_numerator(std::span<const cplx> f1, std::span<const cplx> f2, const BeamSplitter& bs,
                                  Outcome outcome);

/// {"outcome", "grid", "probability"}; the CSV carries the values.
nlohmann::json amplitude_metadata(const TwoPhotonAmplitude& amp);
/// Header "i,j,re,im" then n^2 rows, 17 significant digits.
void write_amplitude_csv(const TwoPhotonAmplitude& amp, std::ostream& out);

}  // namespace biphoton
