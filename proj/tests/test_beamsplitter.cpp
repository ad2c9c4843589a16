#include <doctest.h>

#include <cmath>
#include <algorithm>
#include <random>
#include <sstream>

#include "biphoton/beamsplitter.hpp"
#include "biphoton/errors.hpp"

using namespace biphoton;

namespace {

// |numerator|^2 integrated over the grid by brute force, one element at a time.
double brute_norm(const TemporalShape& f1, const TemporalShape& f2, const BeamSplitter& bs, Outcome o,
                  const TimeGrid& g) {
  const double t = bs.t(), r = bs.r();
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = 0; j < g.size(); ++j) {
      const double a = g.at(i), b = g.at(j);
      cplx v;
      if (o == Outcome::Out11)
        v = t * t * f1(a) * f2(b) - r * r * f2(a) * f1(b);
      else
        v = r * t * (f1(a) * f2(b) + f2(a) * f1(b)) / std::sqrt(2.0);
      s += g.weight(i) * g.weight(j) * std::norm(v);
    }
  return s;
}

}  // namespace

TEST_CASE("beam splitter construction") {
  const auto bs = BeamSplitter::from_t_sq(0.3);
  CHECK(bs.t_sq() == doctest::Approx(0.3));
  CHECK(bs.r_sq() == doctest::Approx(0.7));
  CHECK_THROWS_AS(BeamSplitter::from_t_sq(1.5), InvalidArgument);
  CHECK_THROWS_AS(BeamSplitter(-0.1), InvalidArgument);
  CHECK(path_indistinguishability(BeamSplitter(0.768)) == doctest::Approx(0.1797).epsilon(1e-3));
  CHECK(outcome_from_name("11") == Outcome::Out11);
  CHECK(outcome_name(Outcome::Out20) == "20");
  CHECK_THROWS_AS(outcome_from_name("21"), InvalidArgument);
}

TEST_CASE("outcome probabilities closed forms") {
  const auto half = BeamSplitter::from_t_sq(0.5);
  auto p = outcome_probabilities(1.0, half);
  CHECK(p.p11 == 0.0);
  CHECK(p.p20 == doctest::Approx(0.5));
  p = outcome_probabilities(0.0, half);
  CHECK(p.p11 == doctest::Approx(0.5));
  CHECK(p.p20 == doctest::Approx(0.25));
  p = outcome_probabilities(0.4, BeamSplitter::from_t_sq(1.0));
  CHECK(p.p11 == doctest::Approx(1.0));
  CHECK(p.p20 == 0.0);
  p = outcome_probabilities(1.0 / std::sqrt(65.0), half);
  CHECK(p.p11 == doctest::Approx(0.5 * (1.0 - 1.0 / 65.0)).epsilon(1e-12));
  CHECK(p.p20 == p.p02);
}

TEST_CASE("probabilities sum to one") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 500; ++k) {
    const auto p = outcome_probabilities(u(rng), BeamSplitter::from_t_sq(u(rng)));
    CHECK(std::abs(p.p20 + p.p11 + p.p02 - 1.0) < 1e-12);
    CHECK(p.p11 >= 0.0);
  }
}

TEST_CASE("joint amplitude normalization and symmetry") {
  TimeGrid g(0.0, 15.0, 151);
  const auto f1 = TemporalShape::exp_decay(1.0, 2.0), f2 = TemporalShape::exp_decay_sine(1.3, 0.8, 0.5);
  const auto bs = BeamSplitter::from_t_sq(0.35);
  const auto p = outcome_probabilities(f1, f2, bs, g);
  for (Outcome o : {Outcome::Out20, Outcome::Out11, Outcome::Out02}) {
    const auto amp = joint_amplitude(f1, f2, bs, o, g);
    CHECK(amp.norm_sq() == doctest::Approx(1.0).epsilon(1e-3));
  }
  CHECK(brute_norm(f1, f2, bs, Outcome::Out11, g) == doctest::Approx(p.p11).epsilon(2e-3));

  const auto a20 = joint_amplitude(f1, f2, bs, Outcome::Out20, g);
  const auto a02 = joint_amplitude(f1, f2, bs, Outcome::Out02, g);
  for (std::size_t i = 0; i < g.size(); i += 17)
    for (std::size_t j = 0; j < g.size(); j += 13) {
      CHECK(std::abs(a20(i, j) - a20(j, i)) < 1e-14);
      CHECK(std::abs(a20(i, j) + a02(i, j)) < 1e-14);
    }
}

TEST_CASE("global phase does not change probabilities") {
  TimeGrid g(0.0, 20.0, 801);
  const auto f1 = TemporalShape::exp_decay(1.0, 3.0);
  std::vector<cplx> rotated(g.size());
  const auto f2 = TemporalShape::exp_decay(0.8, -1.0);
  for (std::size_t i = 0; i < g.size(); ++i) rotated[i] = std::polar(1.0, 1.1) * f2(g.at(i));
  const auto f2r = TemporalShape::from_samples(g, rotated);
  const auto bs = BeamSplitter::from_t_sq(0.6);
  const auto a = outcome_probabilities(f1, f2, bs, g), b = outcome_probabilities(f1, f2r, bs, g);
  CHECK(a.p11 == doctest::Approx(b.p11).epsilon(1e-9));
  CHECK(a.J_abs == doctest::Approx(b.J_abs).epsilon(1e-9));
}

TEST_CASE("degenerate outcome") {
  TimeGrid g(0.0, 20.0, 201);
  const auto f = TemporalShape::exp_decay(1.0);
  CHECK_THROWS_AS(joint_amplitude(f, f, BeamSplitter::from_t_sq(0.5), Outcome::Out11, g), DegenerateOutcomeError);
  CHECK_THROWS_AS(joint_amplitude(f, f, BeamSplitter::from_t_sq(1.0), Outcome::Out20, g), DegenerateOutcomeError);
}

TEST_CASE("amplitude csv") {
  const auto amp = joint_amplitude(TemporalShape::exp_decay(1.0, 4.0), TemporalShape::exp_decay(1.0, -4.0),
                                   BeamSplitter::from_t_sq(0.5), Outcome::Out11, TimeGrid(0.0, 20.0, 3));
  std::ostringstream os;
  write_amplitude_csv(amp, os);
  const std::string s = os.str();
  CHECK(s.rfind("i,j,re,im\n", 0) == 0);
  CHECK(std::count(s.begin(), s.end(), '\n') == 10);
  CHECK(amplitude_metadata(amp)["outcome"] == "11");
}
