#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/Dense>

#include "biphoton/entanglement.hpp"
#include "biphoton/errors.hpp"

using namespace biphoton;

namespace {

double entropy2(double a) {
  double s = 0.0;
  for (double x : {a, 1.0 - a})
    if (x > 0.0) s -= x * std::log2(x);
  return s;
}

}  // namespace

TEST_CASE("analytic Schmidt values") {
  const auto half = BeamSplitter::from_t_sq(0.5);
  for (double J : {0.0, 0.25, 0.5, 0.75, 0.99}) {
    const auto r = schmidt_analytic(J, half, Outcome::Out11);
    CHECK(r.entropy == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(r.lambda_sq_plus == doctest::Approx(0.5));
  }
  const auto r20 = schmidt_analytic(0.5, half, Outcome::Out20);
  CHECK(r20.lambda_sq_plus == doctest::Approx(2.25 / 2.5));
  CHECK(r20.entropy == doctest::Approx(0.4690).epsilon(0.0005 / 0.469));
  for (double t2 : {0.0, 1.0}) {
    const auto r = schmidt_analytic(0.3, BeamSplitter::from_t_sq(t2), Outcome::Out11);
    CHECK(r.entropy == 0.0);
  }
  CHECK_THROWS_AS(schmidt_analytic(1.0, half, Outcome::Out11), DegenerateOutcomeError);
}

TEST_CASE("analytic entropy properties") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 0.98);
  for (int k = 0; k < 200; ++k) {
    const double J = u(rng), t2 = u(rng);
    const auto a = schmidt_analytic(J, BeamSplitter::from_t_sq(t2), Outcome::Out11);
    const auto b = schmidt_analytic(J, BeamSplitter::from_t_sq(1.0 - t2), Outcome::Out11);
    CHECK(a.lambda_sq_plus + a.lambda_sq_minus == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(a.entropy == doctest::Approx(b.entropy).epsilon(1e-9));
    CHECK(a.entropy == doctest::Approx(entropy2(a.lambda_sq_plus)).epsilon(1e-12));
    // Out20 entropy ignores the splitter and drops as J grows
    const auto c = schmidt_analytic(J, BeamSplitter::from_t_sq(t2), Outcome::Out20);
    const auto d = schmidt_analytic(std::min(J + 0.01, 1.0), BeamSplitter::from_t_sq(0.5), Outcome::Out20);
    CHECK(d.entropy <= c.entropy + 1e-12);
  }
}

TEST_CASE("von Neumann entropy") {
  const std::vector<double> bell{std::sqrt(0.5), std::sqrt(0.5)};
  CHECK(von_neumann_entropy(bell) == doctest::Approx(1.0));
  const std::vector<double> product{1.0};
  CHECK(von_neumann_entropy(product) == 0.0);
  const std::vector<double> bad{0.9, 0.9};
  CHECK_THROWS_AS(von_neumann_entropy(bad), NormalizationError);
}

TEST_CASE("numeric Schmidt decomposition on the ED pair") {
  TimeGrid g(0.0, 20.0, 1001);
  const auto f1 = TemporalShape::exp_decay(1.0, 8.0), f2 = TemporalShape::exp_decay(1.0, -8.0);
  const auto amp = joint_amplitude(f1, f2, BeamSplitter::from_t_sq(0.5), Outcome::Out11, g);
  const auto d = schmidt_numeric(amp);
  REQUIRE(d.coefficients.size() == 2);
  const auto w = d.weights();
  CHECK(w[0] == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(w[1] == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(d.entropy() == doctest::Approx(1.0).epsilon(1e-8));

  // modes are orthonormal on the grid
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t b = 0; b < 2; ++b) {
      const cplx ip = g.inner(d.modes_a[a].samples()->values, d.modes_a[b].samples()->values);
      CHECK(std::abs(ip - (a == b ? 1.0 : 0.0)) < 1e-10);
    }

  // reconstruction
  double err = 0.0;
  for (std::size_t i = 0; i < g.size(); i += 7)
    for (std::size_t j = 0; j < g.size(); j += 11) {
      cplx v = 0.0;
      for (std::size_t k = 0; k < 2; ++k)
        v += d.coefficients[k] * d.modes_a[k].samples()->values[i] * d.modes_b[k].samples()->values[j];
      err = std::max(err, std::abs(v - amp(i, j)));
    }
  CHECK(err < 1e-9);
}

TEST_CASE("distinguishable photons: modes span the inputs") {
  TimeGrid g(-12.0, 12.0, 801);
  const auto f1 = TemporalShape::gaussian(1.0, -5.0), f2 = TemporalShape::gaussian(1.0, 5.0);
  const auto amp = joint_amplitude(f1, f2, BeamSplitter::from_t_sq(0.3), Outcome::Out11, g);
  const auto d = schmidt_numeric(amp);
  REQUIRE(d.coefficients.size() == 2);
  const Eigen::MatrixXcd ov = mode_overlaps(d, f1, f2);
  // each input lies in the span of the first-axis modes
  for (int r = 0; r < 2; ++r) CHECK(ov.row(r).squaredNorm() == doctest::Approx(1.0).epsilon(1e-8));
  // at J = 0 the Schmidt weights are t^4 and r^4 over their sum
  CHECK(d.weights()[0] == doctest::Approx(0.49 / 0.58).epsilon(1e-8));
}

TEST_CASE("rank-revealing and dense factorizations agree") {
  TimeGrid g(0.0, 25.0, 301);
  const auto f1 = TemporalShape::exp_decay_sine(1.2, 0.7), f2 = TemporalShape::exp_decay(0.6, 1.5, 0.3);
  for (Outcome o : {Outcome::Out11, Outcome::Out20}) {
    const auto amp = joint_amplitude(f1, f2, BeamSplitter::from_t_sq(0.62), o, g);
    const auto rr = schmidt_numeric(amp, {1e-8, SvdMethod::RankRevealing, 32});
    const auto dn = schmidt_numeric(amp, {1e-8, SvdMethod::Dense, 32});
    REQUIRE(rr.coefficients.size() == dn.coefficients.size());
    for (std::size_t k = 0; k < rr.coefficients.size(); ++k)
      CHECK(rr.coefficients[k] == doctest::Approx(dn.coefficients[k]).epsilon(1e-10));
    const auto an = schmidt_analytic(std::abs(overlap_J(f1, f2, g)), BeamSplitter::from_t_sq(0.62), o);
    CHECK(rr.weights()[0] == doctest::Approx(std::max(an.lambda_sq_plus, an.lambda_sq_minus)).epsilon(1e-6));
  }
}

TEST_CASE("entropy surface") {
  const auto cells = entropy_surface(Outcome::Out11, {0.0, 1.0}, {0.0, 1.0}, 5, 3);
  REQUIRE(cells.size() == 15);
  CHECK(cells[0].J_abs == 0.0);
  CHECK(cells[1].t_sq == doctest::Approx(0.5));
  CHECK(*cells[1].entropy == doctest::Approx(1.0));
  CHECK_FALSE(cells[13].entropy.has_value());  // |J| = 1 on a balanced splitter
  std::ostringstream os;
  write_surface_csv(cells, Outcome::Out11, os);
  CHECK(os.str().find("1,0.5,11,\n") != std::string::npos);

  const auto s20 = entropy_surface(Outcome::Out20, {0.5, 0.5}, {0.0, 1.0}, 1, 11);
  for (const auto& c : s20) CHECK(*c.entropy == doctest::Approx(0.4690).epsilon(1e-3));
}
