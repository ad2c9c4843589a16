#include "biphoton/beamsplitter.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include <fmt/format.h>

#include "biphoton/errors.hpp"
#include "biphoton/parallel.hpp"
#include "biphoton/shape_json.hpp"
#include "biphoton/simd/kernels.hpp"

namespace biphoton {

BeamSplitter::BeamSplitter(double t) : t_(t) {
  if (!std::isfinite(t) || t < 0.0 || t > 1.0) throw InvalidArgument("beam splitter t must lie in [0, 1]");
  r_ = std::sqrt(1.0 - t * t);
}

BeamSplitter BeamSplitter::from_t_sq(double t_sq) {
  if (!std::isfinite(t_sq) || t_sq < 0.0 || t_sq > 1.0)
    throw InvalidArgument("beam splitter t^2 must lie in [0, 1]");
  return BeamSplitter(std::sqrt(t_sq));
}

double path_indistinguishability(const BeamSplitter& bs) { return bs.t_sq() - bs.r_sq(); }

std::string_view outcome_name(Outcome o) {
  switch (o) {
    case Outcome::Out20: return "20";
    case Outcome::Out11: return "11";
    case Outcome::Out02: return "02";
  }
  return "?";
}

Outcome outcome_from_name(std::string_view name) {
  if (name == "20") return Outcome::Out20;
  if (name == "11") return Outcome::Out11;
  if (name == "02") return Outcome::Out02;
  throw InvalidArgument("unknown outcome '" + std::string(name) + "' (expected 20, 11 or 02)");
}

double OutcomeProbabilities::of(Outcome o) const noexcept {
  switch (o) {
    case Outcome::Out20: return p20;
    case Outcome::Out11: return p11;
    case Outcome::Out02: return p02;
  }
  return 0.0;
}

OutcomeProbabilities outcome_probabilities(double J_abs, const BeamSplitter& bs) {
  if (!std::isfinite(J_abs) || J_abs < 0.0 || J_abs > 1.0 + 1e-9)
    throw InvalidArgument("|J| must lie in [0, 1]");
  J_abs = std::min(J_abs, 1.0);  // rounding can push a sampled overlap a hair past 1
  const double t2 = bs.t_sq(), r2 = bs.r_sq(), j2 = J_abs * J_abs;
  const double p20 = t2 * r2 * (1.0 + j2);
  const double p11 = t2 * t2 + r2 * r2 - 2.0 * t2 * r2 * j2;
  return {p20, p11, p20, J_abs};
}

OutcomeProbabilities outcome_probabilities(const TemporalShape& f1, const TemporalShape& f2,
                                           const BeamSplitter& bs, const TimeGrid& grid) {
  return outcome_probabilities(std::abs(overlap_J(f1, f2, grid)), bs);
}

TwoPhotonAmplitude::TwoPhotonAmplitude(Outcome outcome, TimeGrid grid, std::vector<cplx> values,
                                       double probability)
    : outcome_(outcome), grid_(grid), values_(std::move(values)), probability_(probability) {
  if (values_.size() != grid_.size() * grid_.size())
    throw InvalidArgument("joint amplitude needs n_points^2 values");
}

double TwoPhotonAmplitude::norm_sq() const {
  double acc = 0.0;
  for (std::size_t i = 0; i < size(); ++i) acc += grid_.weight(i) * grid_.norm_sq(row(i));
  return acc;
}

std::vector<cplx> joint_numerator(std::span<const cplx> f1, std::span<const cplx> f2, const BeamSplitter& bs,
                                  Outcome outcome) {
  const std::size_t n = f1.size();
  if (f2.size() != n) throw InvalidArgument("input sample counts differ");
  std::vector<cplx> out(n * n);
  const double t2 = bs.t_sq(), r2 = bs.r_sq();
  // 1/sqrt(2) from the two-photon Fock state keeps |numerator|^2 integrating to P20
  const double rt = bs.r() * bs.t() / std::sqrt(2.0);
  const double sign = outcome == Outcome::Out02 ? -1.0 : 1.0;
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      std::span<cplx> row(out.data() + i * n, n);
      if (outcome == Outcome::Out11) {
        // row i: t^2 f1(tau_i) f2 - r^2 f2(tau_i) f1
        simd::combine2(t2 * f1[i], f2, -r2 * f2[i], f1, row);
      } else {
        simd::combine2(sign * rt * f1[i], f2, sign * rt * f2[i], f1, row);
      }
    }
  });
  return out;
}

TwoPhotonAmplitude joint_amplitude(const TemporalShape& f1, const TemporalShape& f2, const BeamSplitter& bs,
                                   Outcome outcome, const TimeGrid& grid) {
  const Sampling s1 = sample(f1, grid);
  const Sampling s2 = sample(f2, grid);
  const auto& v1 = s1.shape.samples()->values;
  const auto& v2 = s2.shape.samples()->values;
  const OutcomeProbabilities probs = outcome_probabilities(std::abs(normalized_inner(grid, v1, v2)), bs);
  const double p = probs.of(outcome);
  if (!(p > kDegenerateProbability))
    throw DegenerateOutcomeError("outcome |" + std::string(outcome_name(outcome)) + "> has probability " +
                                 fmt::format("{:.3g}", p) + "; its amplitude cannot be normalized");
  std::vector<cplx> values = joint_numerator(v1, v2, bs, outcome);
  simd::scale(1.0 / std::sqrt(p), values);
  return TwoPhotonAmplitude(outcome, grid, std::move(values), p);
}

nlohmann::json amplitude_metadata(const TwoPhotonAmplitude& amp) {
  return {{"outcome", std::string(outcome_name(amp.outcome()))},
          {"grid", grid_to_json(amp.grid())},
          {"probability", amp.probability()}};
}

void write_amplitude_csv(const TwoPhotonAmplitude& amp, std::ostream& out) {
  out << "i,j,re,im\n";
  fmt::memory_buffer buf;
  const std::size_t n = amp.size();
  for (std::size_t i = 0; i < n; ++i) {
    buf.clear();
    for (std::size_t j = 0; j < n; ++j) {
      const cplx v = amp(i, j);
      fmt::format_to(std::back_inserter(buf), "{},{},{:.17g},{:.17g}\n", i, j, v.real(), v.imag());
    }
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  }
}

}  // namespace biphoton
