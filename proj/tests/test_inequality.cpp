#include <doctest.h>

#include "carrots/inequality.hpp"

#include <cmath>
#include <numbers>

using namespace carrots;
using std::numbers::pi;

namespace {

const ComponentDescriptor H0 = ComponentDescriptor::main_cardioid();

// Multiplier of the alpha fixed point from the quadratic formula.
Complex alpha_multiplier(Complex c) { return 1.0 - std::sqrt(1.0 - 4.0 * c); }

Complex cardioid(Complex mu) { return mu / 2.0 - mu * mu / 4.0; }

}  // namespace

TEST_CASE("angle of vision") {
  CHECK(angle_of_vision({1.0, pi}, Angle(1, 3), Angle(2, 3)) == doctest::Approx(2 * std::atan(pi / 3)));
  CHECK(angle_of_vision({1.0, pi}, Angle(1, 3), Angle(2, 3)) == doctest::Approx(1.616897).epsilon(1e-6));
  CHECK(angle_of_vision({1e-9, pi}, Angle(1, 3), Angle(2, 3)) == doctest::Approx(pi).epsilon(1e-8));
  // seen from far away the interval shrinks to a point
  CHECK(angle_of_vision({1e6, 0.5}, Angle(1, 7), Angle(2, 7)) < 1e-5);
  CHECK_THROWS_AS(angle_of_vision({0.0, pi}, Angle(1, 3), Angle(2, 3)), InequalityError);
  CHECK_THROWS_AS(angle_of_vision({1.0, pi}, Angle(2, 3), Angle(1, 3)), InequalityError);
  CHECK(vision_floor(H0) == doctest::Approx(std::atan(pi)));
  CHECK(vision_floor(H0) == doctest::Approx(1.262627).epsilon(1e-6));
}

TEST_CASE("torus moduli") {
  const double x = std::log(std::sqrt(5.0) - 1);
  ModulusPair basilica = torus_moduli({x, pi}, 1, 2, 1);
  CHECK(basilica.mod_T_gamma == doctest::Approx(2 * pi / (2 * 2 * x)));
  CHECK(basilica.mod_A_o == doctest::Approx(pi / (2 * std::log(2.0))));
  CHECK(basilica.mod_A_o == doctest::Approx(2.2662).epsilon(1e-4));

  ModulusPair cheb = torus_moduli({std::log(2.0), pi}, 1, 2, 1);
  CHECK(cheb.mod_T_gamma == doctest::Approx(cheb.mod_A_o).epsilon(1e-14));

  CHECK(torus_moduli({1e-9, pi + 1.0}, 1, 2, 1).mod_T_gamma < 1e-8);
  CHECK_THROWS_AS(torus_moduli({0.0, pi}, 1, 2, 1), InequalityError);
}

TEST_CASE("basilica and Chebyshev checks") {
  InequalityReport b = yoccoz_levin_check(-1.0, H0, 1, 2);
  CHECK(std::abs(b.lambda - (1 - std::sqrt(5.0))) < 1e-10);
  CHECK(b.lhs == doctest::Approx(std::log(std::sqrt(5.0) - 1)).epsilon(1e-9));
  CHECK(b.rhs == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(b.omega == pi);
  CHECK(b.pass);
  CHECK(b.theta == doctest::Approx(0.0));
  CHECK(b.eta_minus == Angle(1, 3));
  CHECK(b.eta_plus == Angle(2, 3));

  InequalityReport c = yoccoz_levin_check(-2.0, H0, 1, 2);
  CHECK(std::abs(c.lambda + 2.0) < 1e-10);
  CHECK(std::abs(c.Lambda - Complex(std::log(2.0), pi)) < 1e-10);
  CHECK(std::abs(c.margin()) < 1e-10);
  CHECK(c.pass);
}

TEST_CASE("a stick parameter outside M sees the wake under a smaller angle") {
  const Complex c = psi_param(std::exp(Complex(0.125, pi)), -2.1);
  InequalityReport r = yoccoz_levin_check(c, H0, 1, 2);
  CHECK(r.outside_m);
  CHECK(std::abs(r.log_phi - Complex(0.125, pi)) < 1e-9);
  CHECK(r.omega == doctest::Approx(2 * std::atan(pi / 3 / 0.125)).epsilon(1e-9));
  CHECK(r.omega < pi);
  CHECK(std::abs(r.lambda - alpha_multiplier(c)) < 1e-9);
  // the classical bound fails here; the inflated one holds
  CHECK(r.lhs > std::log(2.0));
  CHECK(r.pass);
}

TEST_CASE("omega grows along a stick toward M") {
  double last = 0.0;
  for (double h : {0.4, 0.2, 0.1, 0.05, 0.02}) {
    const Complex c = psi_param(std::exp(Complex(h, pi)), -2.1);
    InequalityReport r = yoccoz_levin_check(c, H0, 1, 2);
    CHECK(r.omega > last);
    CHECK(r.pass);
    last = r.omega;
  }
}

TEST_CASE("satellite centers") {
  CHECK(std::abs(satellite_center(1, 0.0, 1, 2) + 1.0) < 1e-12);
  CHECK(std::abs(satellite_center(1, 0.0, 1, 3) - Complex(-0.122561166876654, 0.744861766619744)) < 1e-12);
  CHECK(std::abs(satellite_center(2, -1.0, 1, 2) + 1.3107026413368328) < 1e-12);
  const Complex c = satellite_center(1, 0.0, 2, 5);
  Complex z = 0.0;
  for (int j = 1; j <= 5; ++j) {
    z = z * z + c;
    if (j < 5) CHECK(std::abs(z) > 1e-3);
  }
  CHECK(std::abs(z) < 1e-12);
}

TEST_CASE("wake samples satisfy both inequalities") {
  for (auto [p, q] : {std::pair{1, 2}, std::pair{1, 3}, std::pair{2, 5}}) {
    auto samples = sample_wake(p, q, 30, 5);
    REQUIRE(samples.size() == 30);
    int sticks = 0;
    for (const WakeSample& s : samples) {
      InequalityReport r = yoccoz_levin_check(s.c, H0, p, q);
      CHECK(r.pass);
      CHECK(std::abs(r.lambda - alpha_multiplier(s.c)) < 1e-8);
      CHECK(r.Lambda.imag() >= 2 * pi * p / q - pi);
      CHECK(r.Lambda.imag() < 2 * pi * p / q + pi);
      if (s.kind == WakeSample::Kind::stick) {
        ++sticks;
        CHECK(r.outside_m);
        CHECK(r.omega >= vision_floor(H0) - 1e-12);
      } else {
        CHECK_FALSE(r.outside_m);
        CHECK(grotzsch_holds(r.moduli));
        // with omega = pi the inequality is the Grotzsch inequality rearranged
        CHECK(r.pass == grotzsch_holds(r.moduli, 1e-9 * r.moduli.mod_T_gamma));
      }
    }
    CHECK(sticks > 5);
  }
}

TEST_CASE("samples are reproducible") {
  auto a = sample_wake(1, 3, 12, 42);
  auto b = sample_wake(1, 3, 12, 42);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].c == b[i].c);
}

TEST_CASE("Lambda tends to 2 pi i p/q at the root") {
  const Complex center = satellite_center(1, 0.0, 1, 3);
  double last = INFINITY;
  for (double rho : {0.5, 0.9, 0.99, 0.999}) {
    const Complex c = component_point(3, center, rho).c;
    InequalityReport r = yoccoz_levin_check(c, H0, 1, 3);
    CHECK(r.lhs < last);
    last = r.lhs;
  }
  CHECK(last < 0.05);
}

TEST_CASE("boundary cases and bad input") {
  // at the root alpha is parabolic: a boundary case, not a violation
  InequalityReport r = yoccoz_levin_check(-0.75, H0, 1, 2);
  CHECK_FALSE(r.repelling);
  CHECK_FALSE(r.violation());
  CHECK(r.lhs < 1e-6);
  // inside the main cardioid the rays 1/3 and 2/3 land on a 2-cycle
  CHECK_THROWS_AS(yoccoz_levin_check(cardioid(std::polar(0.9, 0.95 * pi)), H0, 1, 2), ColandingFailure);
  CHECK_THROWS_AS(yoccoz_levin_check(-1.0, H0, 2, 4), InequalityError);
}

TEST_CASE("limb scaling") {
  LimbTable t = limb_scaling_experiment(H0, 4);
  REQUIRE(t.rows.size() == 5);
  CHECK(t.rows[0].q == 2);
  CHECK(std::abs(t.rows[0].root + 0.75) < 1e-6);
  CHECK(t.rows[0].extent >= 1.25 - 1e-6);
  CHECK(std::abs(t.rows[1].root - cardioid(std::polar(1.0, 2 * pi / 3))) < 1e-6);
  for (const LimbRow& row : t.rows) {
    CHECK(row.tips > 0);
    CHECK(row.scaled == doctest::Approx(row.extent * row.q));
  }
  CHECK(std::isfinite(t.empirical_c));
  CHECK(t.spread >= 1.0);
  CHECK_THROWS_AS(limb_scaling_experiment(H0, 1), InequalityError);
}
