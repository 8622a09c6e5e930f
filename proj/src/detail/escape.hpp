#pragma once

// Shared orbit kernels. `param` selects the parameter plane, where the
// starting point is also the parameter and derivatives are taken in c.

#include "carrots/combinatorics.hpp"
#include "carrots/scalar.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace carrots::detail {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

template <class Real>
struct Escape {
  BasicComplex<Real> z;
  Complex dz;  // d z_n / d(start) or d z_n / dc
  int n = 0;
  bool escaped = false;
};

template <class Real>
Escape<Real> escape_orbit(BasicComplex<Real> c, BasicComplex<Real> z, bool param, double radius, int max_iter) {
  const double r2 = radius * radius;
  Complex dz(1.0, 0.0);
  const double shift = param ? 1.0 : 0.0;
  for (int n = 0; n <= max_iter; ++n) {
    if (z.norm() > r2) return {z, dz, n, true};
    if (n == max_iter) break;
    Complex zd = z.to_complex();
    dz = 2.0 * zd * dz + shift;
    z = square(z) + c;
  }
  return {z, dz, max_iter, false};
}

inline double wrap_pi(double a) {
  a = std::remainder(a, two_pi);
  return a <= -std::numbers::pi ? a + two_pi : a;
}

/// frac(2^j theta) for an exact angle plus a small real offset.
class AngleOrbit {
 public:
  explicit AngleOrbit(const Angle& base, double offset = 0.0) : offset_(offset) {
    OrbitShape shape = orbit_shape(base);
    preperiod_ = shape.preperiod;
    period_ = shape.period;
    points_.reserve(preperiod_ + period_);
    for (const Angle& a : forward_orbit(base)) points_.push_back(a.to_double());
  }
  /// Offset-only orbit; used when the target angle is only known as a double.
  static AngleOrbit approximate(double turns) {
    AngleOrbit a(Angle(0, 1), turns - std::floor(turns));
    return a;
  }

  double turns() const { return frac(points_[0] + offset_); }

  /// frac(2^j (theta + offset + extra)).
  double at(int j, double extra = 0.0) const {
    const auto k = static_cast<std::size_t>(j);
    double base = k < points_.size() ? points_[k] : points_[preperiod_ + (k - preperiod_) % period_];
    const double off = offset_ + extra;
    if (off == 0.0) return base;
    return frac(base + frac(std::ldexp(off, j)));
  }

 private:
  static double frac(double x) { return x - std::floor(x); }

  std::vector<double> points_;
  std::size_t preperiod_ = 0;
  std::size_t period_ = 1;
  double offset_ = 0.0;
};

struct LogResidual {
  Complex g;   // 2^-N (Log phi(z_N) - 2^N (h + 2 pi i theta)), branch-wrapped
  Complex dg;  // derivative of g with respect to the moving point
  int n = 0;
  bool escaped = false;
};

/// Residual of "Log phi = h + 2 pi i theta" at x (the start point, or the
/// parameter when `param`). `c` is ignored in the parameter plane.
template <class Real>
LogResidual log_residual(bool param, BasicComplex<Real> c, BasicComplex<Real> x, double h, const AngleOrbit& angle,
                         double radius, int max_iter, double extra_turns = 0.0) {
  if (param) c = x;
  Escape<Real> e = escape_orbit(c, x, param, radius, max_iter);
  if (!e.escaped) return {{}, {}, e.n, false};
  const Complex z = e.z.to_complex();
  const Complex cd = c.to_complex();
  const Complex corr = cd / (2.0 * z * z);
  const double scale = std::ldexp(1.0, -e.n);
  const double re = std::log(std::abs(z)) + corr.real() - std::ldexp(h, e.n);
  const double im = wrap_pi(std::arg(z) + corr.imag() - two_pi * angle.at(e.n, extra_turns));
  return {Complex(re, im) * scale, scale * e.dz / z, e.n, true};
}

}  // namespace carrots::detail
