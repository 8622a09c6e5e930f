#include <doctest.h>

#include "carrots/potential.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace carrots;
using std::numbers::pi;
using namespace std::complex_literals;

namespace {

// Boettcher map of z^2 - 2: the root of w + 1/w = z outside the unit disk.
Complex chebyshev_phi(Complex z) {
  Complex r = std::sqrt(z * z - 4.0);
  Complex a = (z + r) / 2.0, b = (z - r) / 2.0;
  return std::abs(a) >= std::abs(b) ? a : b;
}

double bisect(double lo, double hi, double (*f)(double)) {
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    (f(lo) < 0) == (f(mid) < 0) ? lo = mid : hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("green function examples") {
  CHECK(green_dynamic(0.0, 2.0).value == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(green_dynamic(-2.0, 3.0).value == doctest::Approx(std::log((3 + std::sqrt(5.0)) / 2)).epsilon(1e-13));
  auto inside = green_dynamic(0.0, 0.5);
  CHECK(inside.value == 0.0);
  CHECK_FALSE(inside.escaped);
  CHECK(green_param(0.0).value == 0.0);
  CHECK(green_param(-2.0).value == 0.0);
  CHECK(green_param(3.0).value == green_dynamic(3.0, 3.0).value);
  CHECK(green_param(3.0).value > 0.0);
}

TEST_CASE("green error bound shrinks with more iterations") {
  auto coarse = green_dynamic(0.3 + 0.2i, 1.5, 1e-3);
  auto fine = green_dynamic(0.3 + 0.2i, 1.5, 1e-16);
  CHECK(fine.iterations_used >= coarse.iterations_used);
  CHECK(std::abs(coarse.value - fine.value) <= coarse.error_bound + fine.error_bound);
}

TEST_CASE("functional equation g(Q(z)) = 2 g(z)") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  int checked = 0;
  while (checked < 100) {
    Complex c(u(rng), u(rng)), z(u(rng), u(rng));
    auto g = green_dynamic(c, z);
    if (!g.escaped || g.value < 0.01 || g.value > 2) continue;
    auto g1 = green_dynamic(c, z * z + c);
    CHECK(std::abs(g1.value - 2 * g.value) <= g1.error_bound + 2 * g.error_bound + 1e-15);
    ++checked;
  }
}

TEST_CASE("log Boettcher examples") {
  auto a = log_bottcher_dynamic(0.0, 2.0);
  REQUIRE(a.valid);
  CHECK(std::abs(a.value - Complex(std::log(2.0), 0.0)) < 1e-14);
  auto b = log_bottcher_dynamic(0.0, 2.0i);
  REQUIRE(b.valid);
  CHECK(std::abs(b.value - Complex(std::log(2.0), pi / 2)) < 1e-14);
  auto c = log_bottcher_dynamic(-2.0, 3.0);
  REQUIRE(c.valid);
  CHECK(std::abs(c.value - Complex(std::log((3 + std::sqrt(5.0)) / 2), 0.0)) < 1e-13);
  // below the critical equipotential the coordinate is not defined
  CHECK_FALSE(log_bottcher_dynamic(0.0, 0.5).valid);
  CHECK_FALSE(log_bottcher_dynamic(1.0, 0.0).valid);
  CHECK_FALSE(log_bottcher_dynamic(1.0, 0.5i).valid);  // Q(0.5i) = 0.75 < c
}

TEST_CASE("Chebyshev oracle for the Boettcher map of z^2 - 2") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> radius(2.5, 10.0), arg(0.0, 2 * pi);
  for (int i = 0; i < 50; ++i) {
    Complex z = std::polar(radius(rng), arg(rng));
    auto lb = log_bottcher_dynamic(-2.0, z);
    REQUIRE(lb.valid);
    Complex phi = std::exp(lb.value);
    CHECK(std::abs(phi - chebyshev_phi(z)) < 1e-10);
    CHECK(lb.value.real() == doctest::Approx(green_dynamic(-2.0, z).value).epsilon(1e-12));
  }
}

TEST_CASE("log Boettcher real part matches the potential close to the Julia set") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  int checked = 0;
  while (checked < 40) {
    Complex c(u(rng), u(rng)), z(u(rng), u(rng));
    auto lb = log_bottcher_dynamic(c, z);
    if (!lb.valid) continue;
    auto g = green_dynamic(c, z);
    CHECK(std::abs(lb.value.real() - g.value) <= g.error_bound + 1e-15);
    // Log phi(Q(z)) = 2 Log phi(z) mod 2 pi i, when Q(z) also qualifies
    auto lb1 = log_bottcher_dynamic(c, z * z + c);
    REQUIRE(lb1.valid);
    double turn = std::remainder(lb1.value.imag() - 2 * lb.value.imag(), 2 * pi);
    CHECK(std::abs(turn) < 1e-8);
    ++checked;
  }
}

TEST_CASE("Phi examples and derivative") {
  CHECK(std::abs(phi_param(-2.0 - 1e-8).value + 1.0) < 1e-3);
  Complex c = 100.0 * std::polar(1.0, 0.7);
  CHECK(std::abs(phi_param(c).value / c - 1.0) < 0.05);
  CHECK_THROWS_AS(phi_param(0.0), PotentialError);

  for (Complex c0 : {Complex(0.5, 0.5), Complex(-1.0, 0.4), Complex(-2.2, 0.0), Complex(0.3, -0.7)}) {
    auto v = phi_param(c0);
    CHECK(std::abs(v.value) == doctest::Approx(std::exp(green_param(c0).value)).epsilon(1e-12));
    const double step = 1e-6;
    Complex fd = (phi_param(c0 + step).value - phi_param(c0 - step).value) / (2 * step);
    CHECK(std::abs(fd - v.derivative) < 1e-6 * std::abs(v.derivative));
  }
}

TEST_CASE("Psi inverts Phi") {
  for (int j = 0; j < 64; ++j) {
    Complex w = std::polar(std::exp(2.0), 2 * pi * j / 64.0);
    Complex c = psi_param(w, w);
    CHECK(std::abs(phi_param(c).value - w) < 1e-8);
  }
  Complex w(10.0, 0.0);
  Complex c = psi_param(w, w);
  CHECK(std::abs(c - (w - 0.5)) < 0.1);
  CHECK(std::abs(phi_param(c).value - w) <= 1e-11 * std::abs(w));

  // continue along the real ray 1/2 down to potential 0.1
  Complex seed = -std::exp(2.0);
  for (double h = 2.0; h >= 0.1 - 1e-12; h -= 0.1) seed = psi_param(-std::exp(h), seed);
  CHECK(std::abs(seed.imag()) < 1e-12);
  CHECK(seed.real() < -2.0);
  CHECK(seed.real() > -2.1);
}

TEST_CASE("periodic points") {
  auto a = periodic_point(0.0, 1, 0.9);
  CHECK(std::abs(a.z - 1.0) < 1e-12);
  CHECK(std::abs(a.multiplier - 2.0) < 1e-12);
  auto b = periodic_point(-1.0, 1, -0.6);
  CHECK(std::abs(b.z - (1 - std::sqrt(5.0)) / 2) < 1e-12);
  CHECK(std::abs(b.multiplier - (1 - std::sqrt(5.0))) < 1e-12);
  auto c = periodic_point(-2.0, 1, 1.9);
  CHECK(std::abs(c.z - 2.0) < 1e-12);
  CHECK(std::abs(c.multiplier - 4.0) < 1e-12);
  // asking for period 2 near a fixed point reports the divisor
  auto d = periodic_point(-1.0, 2, -0.6);
  CHECK(d.exact_period == 1);
  // genuine 2-cycle of z^2 - 2: roots of z^2 + z - 1 = 0
  auto e = periodic_point(-2.0, 2, 0.6);
  CHECK(e.exact_period == 2);
  CHECK(std::abs(e.multiplier - (-4.0)) < 1e-10);
}

TEST_CASE("multiplier logarithm branch") {
  Complex l = multiplier_log_branch(1 - std::sqrt(5.0), 1, 2);
  CHECK(l.real() == doctest::Approx(std::log(std::sqrt(5.0) - 1)).epsilon(1e-14));
  CHECK(l.real() == doctest::Approx(0.211935).epsilon(1e-5));
  CHECK(l.imag() == doctest::Approx(pi));
  CHECK(multiplier_log_branch(1.0, 1, 2) == Complex(0.0, 0.0));
  Complex m = multiplier_log_branch(-4.0, 1, 2);
  CHECK(m.real() == doctest::Approx(std::log(4.0)));
  CHECK(m.imag() == doctest::Approx(pi));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int i = 0; i < 200; ++i) {
    Complex lambda(u(rng), u(rng));
    int q = 2 + static_cast<int>(rng() % 6), p = 1 + static_cast<int>(rng() % static_cast<unsigned>(q - 1));
    double rel = multiplier_log_branch(lambda, p, q).imag() - 2 * pi * p / q;
    CHECK(rel >= -pi);
    CHECK(rel < pi);
  }
}

TEST_CASE("component centers") {
  CHECK(std::abs(component_center(1, 0.1)) < 1e-12);
  CHECK(std::abs(component_center(2, -0.9) + 1.0) < 1e-12);
  double airplane = bisect(-2.0, -1.5, [](double c) { return c * c * c + 2 * c * c + c + 1; });
  CHECK(std::abs(component_center(3, -1.7) - airplane) < 1e-12);
  CHECK(airplane == doctest::Approx(-1.754878).epsilon(1e-6));
}

TEST_CASE("interior points by multiplier continuation") {
  // main cardioid: c = mu/2 - mu^2/4
  for (double t : {0.1, 0.3, 0.45}) {
    Complex mu = std::polar(0.8, 2 * pi * t);
    auto ip = component_point(1, 0.0, mu);
    CHECK(std::abs(ip.c - (mu / 2.0 - mu * mu / 4.0)) < 1e-12);
  }
  // period-2 disk: c = -1 + mu/4
  Complex mu = std::polar(0.9, 1.0);
  auto ip = component_point(2, -1.0, mu);
  CHECK(std::abs(ip.c - (-1.0 + mu / 4.0)) < 1e-12);
  auto pp = periodic_point(ip.c, 2, ip.z);
  CHECK(std::abs(pp.multiplier - mu) < 1e-10);
}
