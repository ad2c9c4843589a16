#include "biphoton/shaping.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <fmt/format.h>

#include "biphoton/errors.hpp"
#include "biphoton/nelder_mead.hpp"
#include "biphoton/parallel.hpp"
#include "biphoton/simd/kernels.hpp"

namespace biphoton {
namespace {

// Inputs sampled on the grid plus the renormalization factors needed to evaluate them
// consistently at off-grid detection times.
struct SampledPair {
  Sampling s1;
  Sampling s2;
  const TemporalShape& f1;
  const TemporalShape& f2;

  std::span<const cplx> v1() const { return s1.shape.samples()->values; }
  std::span<const cplx> v2() const { return s2.shape.samples()->values; }
  cplx at1(double t) const { return s1.scale * f1(t); }
  cplx at2(double t) const { return s2.scale * f2(t); }
};

struct PureHerald {
  std::vector<cplx> values;  // unnormalized
  double norm_sq;
};

PureHerald herald_amplitude(const SampledPair& in, const BeamSplitter& bs, Outcome outcome, double t_dec,
                            const TimeGrid& grid) {
  const cplx a1 = in.at1(t_dec), a2 = in.at2(t_dec);
  PureHerald h{std::vector<cplx>(grid.size()), 0.0};
  if (outcome == Outcome::Out11) {
    simd::combine2(bs.t_sq() * a1, in.v2(), -bs.r_sq() * a2, in.v1(), h.values);
  } else {
    const double rt = bs.r() * bs.t() / std::sqrt(2.0);
    simd::combine2(rt * a1, in.v2(), rt * a2, in.v1(), h.values);
  }
  h.norm_sq = grid.norm_sq(h.values);
  return h;
}

double success_factor(Outcome outcome) { return outcome == Outcome::Out20 ? 2.0 : 1.0; }

void check_outcome(Outcome outcome) {
  if (outcome == Outcome::Out02)
    throw InvalidArgument("heralding detects in port 1; use outcome 11 or 20");
}

TemporalShape normalized(const TimeGrid& grid, std::vector<cplx> values) {
  return TemporalShape::from_samples(grid, std::move(values));
}

double project_omega(double w, double min_abs) {
  if (std::abs(w) >= min_abs) return w;
  return std::signbit(w) ? -min_abs : min_abs;
}

// Radical inverse in base b, used for the Halton starting points.
double radical_inverse(std::uint64_t i, std::uint64_t base) {
  double inv = 1.0 / static_cast<double>(base), f = inv, r = 0.0;
  while (i > 0) {
    r += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return r;
}

// splitmix64: portable, seedable stream for the Cranley-Patterson shift.
std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

HeraldResult herald_shape(const TemporalShape& f1, const TemporalShape& f2, const BeamSplitter& bs,
                          const HeraldSpec& spec, const TimeGrid& grid, const std::optional<TemporalShape>& target) {
  check_outcome(spec.outcome);
  const SampledPair in{sample(f1, grid), sample(f2, grid), f1, f2};
  PureHerald h = herald_amplitude(in, bs, spec.outcome, spec.t_dec, grid);
  if (!(h.norm_sq > kImpossibleHerald))
    throw ImpossibleHeraldError(fmt::format("no heralding amplitude at t_dec = {}", spec.t_dec));
  HeraldResult out{normalized(grid, std::move(h.values)), {}, success_factor(spec.outcome) * h.norm_sq,
                   std::nullopt, std::nullopt};
  if (target) out.fidelity = shaping_fidelity(out.shape, *target, grid);
  return out;
}

double shaping_fidelity(const TemporalShape& shape, const TemporalShape& target, const TimeGrid& grid) {
  const Sampling a = sample(shape, grid);
  const Sampling b = sample(target, grid);
  return std::norm(grid.inner(a.shape.samples()->values, b.shape.samples()->values));
}

HeraldResult herald_windowed(const TemporalShape& f1, const TemporalShape& f2, const BeamSplitter& bs,
                             const HeraldSpec& spec, const TimeGrid& grid, const std::optional<TemporalShape>& target) {
  check_outcome(spec.outcome);
  if (!std::isfinite(spec.resolution) || spec.resolution < 0.0)
    throw InvalidArgument("detector resolution must be finite and >= 0");
  if (spec.resolution == 0.0) return herald_shape(f1, f2, bs, spec, grid, target);

  const SampledPair in{sample(f1, grid), sample(f2, grid), f1, f2};
  std::vector<cplx> target_values;
  if (target) target_values = sample(*target, grid).shape.samples()->values;

  const auto cells = std::max<std::size_t>(16, static_cast<std::size_t>(std::ceil(spec.resolution / grid.spacing())));
  const double cell = spec.resolution / static_cast<double>(cells);
  const double factor = success_factor(spec.outcome);

  HeraldResult out{TemporalShape::gaussian(1.0), {}, std::nullopt, 0.0, std::nullopt};
  double total = 0.0, mixed_fidelity = 0.0;
  for (std::size_t k = 0; k < cells; ++k) {
    const double t = spec.t_dec - 0.5 * spec.resolution + (static_cast<double>(k) + 0.5) * cell;
    PureHerald h = herald_amplitude(in, bs, spec.outcome, t, grid);
    if (!(h.norm_sq > kImpossibleHerald)) continue;
    const double w = factor * h.norm_sq * cell;
    TemporalShape shape = normalized(grid, std::move(h.values));
    if (target) mixed_fidelity += w * std::norm(grid.inner(shape.samples()->values, target_values));
    total += w;
    out.ensemble.push_back({w, t, std::move(shape)});
  }
  if (!(total > kImpossibleHerald))
    throw ImpossibleHeraldError(fmt::format("no heralding amplitude in the window around t_dec = {}", spec.t_dec));

  for (auto& m : out.ensemble) m.weight /= total;
  out.success_probability = total;
  if (target) out.fidelity = mixed_fidelity / total;

  PureHerald center = herald_amplitude(in, bs, spec.outcome, spec.t_dec, grid);
  if (center.norm_sq > kImpossibleHerald) {
    out.shape = normalized(grid, std::move(center.values));
  } else {
    const auto heaviest = std::max_element(out.ensemble.begin(), out.ensemble.end(),
                                           [](const auto& a, const auto& b) { return a.weight < b.weight; });
    out.shape = heaviest->shape;
  }
  return out;
}

TemporalShape ed_to_edsine_closed_form(double gamma, double delta_omega) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw InvalidArgument("gamma must be finite and > 0");
  if (delta_omega == 0.0 || !std::isfinite(delta_omega)) throw InvalidArgument("detuning must be finite and nonzero");
  return TemporalShape::exp_decay_sine(gamma, 0.5 * delta_omega, 0.0);
}

void ShapingBounds::validate() const {
  const auto all = as_array();
  static constexpr const char* names[] = {"gamma1", "gamma2", "omega1", "omega2", "t", "tau0", "t_dec"};
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (!std::isfinite(all[i].lo) || !std::isfinite(all[i].hi) || !(all[i].lo <= all[i].hi))
      throw InvalidArgument(std::string("bounds for ") + names[i] + " must be finite with lo <= hi");
  }
  if (!(gamma1.lo > 0.0) || !(gamma2.lo > 0.0)) throw InvalidArgument("linewidth bounds must be > 0");
  if (!(t.lo > 0.0) || !(t.hi < 1.0)) throw InvalidArgument("bounds for t must lie inside (0, 1)");
  if (!std::isfinite(min_abs_omega) || !(min_abs_omega > 0.0)) throw InvalidArgument("min_abs_omega must be > 0");
}

std::pair<TemporalShape, TemporalShape> edsine_pair(const ShapingParameters& x) {
  return {TemporalShape::exp_decay_sine(x.gamma1, x.omega1), TemporalShape::exp_decay_sine(x.gamma2, x.omega2)};
}

TemporalShape shifted_target(const TemporalShape& target, double tau0) {
  return std::visit(
      [tau0](const auto& p) -> TemporalShape {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, ExpDecay>) {
          return TemporalShape::exp_decay(p.gamma, p.detuning, tau0);
        } else if constexpr (std::is_same_v<T, ExpDecaySine>) {
          return TemporalShape::exp_decay_sine(p.gamma, p.omega, tau0);
        } else if constexpr (std::is_same_v<T, Gaussian>) {
          return TemporalShape::gaussian(p.width, tau0);
        } else {
          throw InvalidArgument("sampled shapes cannot be shifted by tau0; use an analytic target");
        }
      },
      target.params());
}

double shaping_objective(const ShapingProblem& problem, const ShapingParameters& x) {
  const auto [f1, f2] = problem.family(x);
  const HeraldSpec spec{Outcome::Out11, x.t_dec, 0.0};
  const HeraldResult h = herald_shape(f1, f2, BeamSplitter(x.t), spec, problem.grid);
  return shaping_fidelity(h.shape, shifted_target(problem.target, x.tau0), problem.grid);
}

ShapingOutcome optimize_shaping(const ShapingProblem& problem, const OptimizerConfig& config) {
  problem.bounds.validate();
  if (config.restarts == 0) throw InvalidArgument("optimizer needs at least one restart");
  if (config.budget < config.restarts) throw InvalidArgument("budget must cover at least one evaluation per restart");

  constexpr std::size_t dim = ShapingParameters::kSize;
  const auto box = problem.bounds.as_array();
  auto to_params = [&](std::span<const double> u) {
    std::array<double, dim> a{};
    for (std::size_t k = 0; k < dim; ++k) {
      const double v = std::clamp(u[k], 0.0, 1.0);
      a[k] = k < 2 ? box[k].lo * std::pow(box[k].hi / box[k].lo, v) : box[k].lo + v * (box[k].hi - box[k].lo);
    }
    ShapingParameters x = ShapingParameters::from_array(a);
    x.omega1 = project_omega(x.omega1, problem.bounds.min_abs_omega);
    x.omega2 = project_omega(x.omega2, problem.bounds.min_abs_omega);
    return x;
  };
  auto fidelity_at = [&](std::span<const double> u) -> std::optional<double> {
    try {
      return shaping_objective(problem, to_params(u));
    } catch (const Error&) {
      return std::nullopt;
    }
  };

  std::array<double, dim> shift{};
  std::uint64_t state = config.seed;
  for (double& s : shift) s = static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
  static constexpr std::uint64_t primes[dim] = {2, 3, 5, 7, 11, 13, 17};
  auto halton = [&](std::uint64_t index) {
    std::vector<double> u(dim);
    for (std::size_t k = 0; k < dim; ++k) u[k] = std::fmod(radical_inverse(index, primes[k]) + shift[k], 1.0);
    return u;
  };

  struct RestartRun {
    std::vector<double> start;
    std::vector<double> best;
    double fidelity = std::numeric_limits<double>::quiet_NaN();
    std::size_t evaluations = 0;
  };
  auto objective = [&](std::span<const double> u) {
    const auto f = fidelity_at(u);
    return f ? -*f : 1.0;
  };
  // Re-seed the simplex around the incumbent until a pass stops improving. Returns evaluations used.
  auto refine = [&](std::vector<double>& best, double& best_value, std::size_t cap, double step) {
    std::size_t used = 0;
    while (used < cap) {
      NelderMeadOptions opts;
      opts.max_evaluations = cap - used;
      opts.initial_step = step;
      const NelderMeadResult res = nelder_mead_box(objective, best, opts);
      used += res.evaluations;
      const bool improved = res.value < best_value - 1e-12;
      if (res.value < best_value) {
        best_value = res.value;
        best = res.x;
      }
      if (!improved && step < 1e-3) break;
      step = improved ? 0.05 : step * 0.2;
    }
    return used;
  };

  std::vector<RestartRun> runs(config.restarts);
  const std::size_t share = config.budget / config.restarts;
  constexpr std::size_t kStartAttempts = 64;

  parallel_for(config.restarts, [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      RestartRun& run = runs[r];
      std::optional<double> f0;
      for (std::size_t attempt = 0; attempt < kStartAttempts && run.evaluations < share; ++attempt) {
        run.start = halton(1 + r + attempt * config.restarts);
        ++run.evaluations;
        if ((f0 = fidelity_at(run.start))) break;
      }
      if (!f0) continue;
      run.best = run.start;
      double best_value = -*f0;

      run.evaluations += refine(run.best, best_value, share - run.evaluations, 0.25);
      run.fidelity = -best_value;
    }
  });

  std::optional<std::size_t> winner;
  std::size_t evaluations = 0;
  std::vector<RestartSummary> summaries;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    evaluations += runs[r].evaluations;
    RestartSummary summary{};
    if (!runs[r].start.empty()) summary.start = to_params(runs[r].start).to_array();
    summary.fidelity = runs[r].fidelity;
    summary.evaluations = runs[r].evaluations;
    summaries.push_back(summary);
    if (!std::isnan(runs[r].fidelity) && (!winner || runs[r].fidelity > runs[*winner].fidelity)) winner = r;
  }
  if (!winner) throw NoFeasibleStartError("no restart found a feasible starting point");

  // Whatever budget the restarts left unused goes to polishing the winner.
  std::vector<double> polished = runs[*winner].best;
  double polished_value = -runs[*winner].fidelity;
  if (evaluations < config.budget)
    evaluations += refine(polished, polished_value, config.budget - evaluations, 0.02);
  runs[*winner].best = polished;

  const ShapingParameters x_best = to_params(polished);
  const auto [f1, f2] = problem.family(x_best);
  HeraldResult herald = herald_shape(f1, f2, BeamSplitter(x_best.t), HeraldSpec{Outcome::Out11, x_best.t_dec, 0.0},
                                     problem.grid, shifted_target(problem.target, x_best.tau0));
  const double fidelity = *herald.fidelity;
  ShapingOutcome out{x_best, fidelity, evaluations, std::move(herald), std::move(summaries)};
  return out;
}

nlohmann::json parameters_to_json(const ShapingParameters& x) {
  return {{"gamma1", x.gamma1}, {"gamma2", x.gamma2}, {"omega1", x.omega1}, {"omega2", x.omega2},
          {"t", x.t},           {"tau0", x.tau0},     {"t_dec", x.t_dec}};
}

ShapingParameters parameters_from_json(const nlohmann::json& j) {
  auto get = [&](const char* key) {
    if (!j.contains(key) || !j.at(key).is_number())
      throw InvalidArgument(std::string("parameter '") + key + "' missing or not a number");
    return j.at(key).get<double>();
  };
  return {get("gamma1"), get("gamma2"), get("omega1"), get("omega2"), get("t"), get("tau0"), get("t_dec")};
}

nlohmann::json bounds_to_json(const ShapingBounds& b) {
  auto iv = [](Interval i) { return nlohmann::json::array({i.lo, i.hi}); };
  return {{"gamma1", iv(b.gamma1)}, {"gamma2", iv(b.gamma2)}, {"omega1", iv(b.omega1)},
          {"omega2", iv(b.omega2)}, {"t", iv(b.t)},           {"tau0", iv(b.tau0)},
          {"t_dec", iv(b.t_dec)},   {"min_abs_omega", b.min_abs_omega}};
}

ShapingBounds bounds_from_json(const nlohmann::json& j, ShapingBounds base) {
  if (!j.is_object()) throw InvalidArgument("bounds must be an object");
  auto read = [&](const char* key, Interval& target) {
    if (!j.contains(key)) return;
    const auto& v = j.at(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
      throw InvalidArgument(std::string("bounds for '") + key + "' must be [lo, hi]");
    target = {v[0].get<double>(), v[1].get<double>()};
  };
  read("gamma1", base.gamma1);
  read("gamma2", base.gamma2);
  read("omega1", base.omega1);
  read("omega2", base.omega2);
  read("t", base.t);
  read("tau0", base.tau0);
  read("t_dec", base.t_dec);
  if (j.contains("min_abs_omega")) {
    if (!j.at("min_abs_omega").is_number()) throw InvalidArgument("min_abs_omega must be a number");
    base.min_abs_omega = j.at("min_abs_omega").get<double>();
  }
  for (const auto& [key, _] : j.items()) {
    static constexpr std::string_view known[] = {"gamma1", "gamma2", "omega1", "omega2",
                                                 "t",      "tau0",   "t_dec",  "min_abs_omega"};
    if (std::find(std::begin(known), std::end(known), key) == std::end(known))
      throw InvalidArgument("unknown bounds key '" + key + "'");
  }
  base.validate();
  return base;
}

}  // namespace biphoton
