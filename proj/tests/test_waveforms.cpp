#include <doctest.h>

#include <cmath>
#include <random>

#include "biphoton/errors.hpp"
#include "biphoton/shape_json.hpp"
#include "biphoton/waveforms.hpp"

using namespace biphoton;

TEST_CASE("time grid trapezoid") {
  TimeGrid g(0.0, 2.0, 5);
  CHECK(g.spacing() == doctest::Approx(0.5));
  CHECK(g.at(4) == 2.0);
  CHECK(g.weight(0) == doctest::Approx(0.25));
  CHECK(g.weight(2) == doctest::Approx(0.5));
  std::vector<double> ones(5, 1.0);
  CHECK(g.integrate(ones) == doctest::Approx(2.0));
  CHECK_THROWS_AS(TimeGrid(1.0, 0.0, 10), InvalidArgument);
  CHECK_THROWS_AS(TimeGrid(0.0, 1.0, 1), InvalidArgument);
}

TEST_CASE("analytic shapes at known points") {
  const auto ed = TemporalShape::exp_decay(1.0, 0.0, 0.0);
  CHECK(std::abs(ed(0.0) - cplx(1.0, 0.0)) < 1e-15);
  CHECK(ed(-0.5) == cplx(0.0, 0.0));
  const auto es = TemporalShape::exp_decay_sine(1.0, 1.0, 0.0);
  CHECK(std::abs(es(M_PI)) < 1e-15);
  CHECK(std::abs(es(-1.0)) == 0.0);
  CHECK_THROWS_AS(TemporalShape::exp_decay_sine(1.0, 0.0), InvalidArgument);
  CHECK_THROWS_AS(TemporalShape::exp_decay(-1.0), InvalidArgument);
  CHECK_THROWS_AS(TemporalShape::gaussian(0.0), InvalidArgument);
}

TEST_CASE("normalization and captured norm") {
  TimeGrid g(-10.0, 10.0, 4001);
  const auto gauss = TemporalShape::gaussian(1.0);
  const Sampling s = sample(gauss, g);
  CHECK(g.norm_sq(s.shape.samples()->values) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(captured_norm(TemporalShape::exp_decay(1.0), 0.0, 20.0) == doctest::Approx(1.0 - std::exp(-20.0)).epsilon(1e-14));
  CHECK_THROWS_AS(sample(TemporalShape::exp_decay(1.0), TimeGrid(0.0, 2.0, 201)), CoverageError);

  // analytic captured norm of the sine family agrees with fine quadrature
  const auto es = TemporalShape::exp_decay_sine(0.7, -1.3, 0.2);
  TimeGrid fine(0.2, 3.0, 200001);
  std::vector<double> dens(fine.size());
  for (std::size_t i = 0; i < fine.size(); ++i) dens[i] = std::norm(es(fine.at(i)));
  CHECK(captured_norm(es, 0.2, 3.0) == doctest::Approx(fine.integrate(dens)).epsilon(1e-8));
}

TEST_CASE("overlap J closed forms") {
  TimeGrid g(0.0, 20.0, 2001);
  const cplx J = overlap_J(TemporalShape::exp_decay(1.0, 8.0), TemporalShape::exp_decay(1.0, -8.0), g);
  const cplx expect = 1.0 / cplx(1.0, 8.0);
  CHECK(std::abs(J - expect) < 1e-4);
  CHECK(std::abs(J) == doctest::Approx(1.0 / std::sqrt(65.0)).epsilon(1e-3));

  const auto f = TemporalShape::exp_decay(1.0);
  CHECK(std::abs(overlap_J(f, f, g) - 1.0) < 1e-12);

  TimeGrid wide(-30.0, 30.0, 3001);
  CHECK(std::abs(overlap_J(TemporalShape::gaussian(1.0, -15.0), TemporalShape::gaussian(1.0, 15.0), wide)) < 1e-12);
}

TEST_CASE("overlap properties on random shapes") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> gam(0.3, 3.0), det(-5.0, 5.0), st(0.0, 2.0);
  TimeGrid g(0.0, 40.0, 2001);
  TimeGrid fine(0.0, 40.0, 8001);
  for (int k = 0; k < 20; ++k) {
    const auto a = TemporalShape::exp_decay_sine(gam(rng), det(rng) + 6.0, st(rng));
    const auto b = TemporalShape::gaussian(gam(rng), 5.0 + st(rng));
    const cplx ab = overlap_J(a, b, g), ba = overlap_J(b, a, g);
    CHECK(std::abs(ab - std::conj(ba)) < 1e-14);
    CHECK(std::abs(ab) <= 1.0 + 1e-12);
    // refinement: the answer converges as the grid gets finer
    CHECK(std::abs(overlap_J(a, b, fine) - ab) < 1e-3);
  }
}

TEST_CASE("sampled shapes") {
  TimeGrid g(0.0, 4.0, 5);
  const auto s = TemporalShape::from_samples(g, {1.0, 2.0, 3.0, 2.0, 1.0});
  CHECK(g.norm_sq(s.samples()->values) == doctest::Approx(1.0));
  CHECK(std::abs(s(0.5) - 0.5 * (s(0.0) + s(1.0))) < 1e-15);
  CHECK(s(5.0) == cplx(0.0, 0.0));
  CHECK_THROWS_AS(TemporalShape::from_samples(g, std::vector<cplx>(5, 0.0)), InvalidArgument);
  CHECK_THROWS_AS(TemporalShape::from_samples(g, std::vector<cplx>(3, 1.0)), InvalidArgument);
}

TEST_CASE("shape json round trip") {
  for (const auto& s : {TemporalShape::exp_decay(1.5, -2.0, 0.5), TemporalShape::exp_decay_sine(2.04, -1.49, 0.0),
                        TemporalShape::gaussian(1.0, 1.95)}) {
    const auto back = shape_from_json(shape_to_json(s));
    for (double t : {-1.0, 0.0, 0.7, 3.0}) CHECK(back(t) == s(t));
  }
  CHECK_THROWS_AS(shape_from_json(nlohmann::json{{"kind", "lorentzian"}}), InvalidArgument);
  CHECK_THROWS_AS(shape_from_json(nlohmann::json{{"kind", "gaussian"}}), InvalidArgument);
}
