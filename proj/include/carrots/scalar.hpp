#pragma once

// Scalar types for orbit arithmetic.
//
// Everything that iterates z -> z^2 + c is written against a template
// parameter `Real`, instantiated with `double` or `DoubleDouble`. Only the
// orbit itself needs the extra bits: logarithms of escaped orbit points are
// divided by 2^N afterwards, so they are always evaluated in double.

#include <cmath>
#include <complex>
#include <string_view>

namespace carrots {

using Complex = std::complex<double>;

enum class Precision { standard, extended };

std::string_view to_string(Precision p);
Precision parse_precision(std::string_view s);

/// Unevaluated sum hi + lo with |lo| <= ulp(hi)/2 (about 106 bits).
struct DoubleDouble {
  double hi = 0.0;
  double lo = 0.0;

  constexpr DoubleDouble() = default;
  constexpr DoubleDouble(double x) : hi(x), lo(0.0) {}  // NOLINT: implicit by design of the scalar concept
  constexpr DoubleDouble(double h, double l) : hi(h), lo(l) {}

  explicit operator double() const { return hi + lo; }
};

namespace dd_detail {

inline DoubleDouble quick_two_sum(double a, double b) {
  double s = a + b;
  return {s, b - (s - a)};
}

inline DoubleDouble two_sum(double a, double b) {
  double s = a + b;
  double bb = s - a;
  return {s, (a - (s - bb)) + (b - bb)};
}

inline DoubleDouble two_prod(double a, double b) {
  double p = a * b;
  return {p, std::fma(a, b, -p)};
}

}  // namespace dd_detail

inline DoubleDouble operator+(DoubleDouble a, DoubleDouble b) {
  DoubleDouble s = dd_detail::two_sum(a.hi, b.hi);
  DoubleDouble t = dd_detail::two_sum(a.lo, b.lo);
  s.lo += t.hi;
  s = dd_detail::quick_two_sum(s.hi, s.lo);
  s.lo += t.lo;
  return dd_detail::quick_two_sum(s.hi, s.lo);
}

inline DoubleDouble operator-(DoubleDouble a) { return {-a.hi, -a.lo}; }
inline DoubleDouble operator-(DoubleDouble a, DoubleDouble b) { return a + (-b); }

inline DoubleDouble operator*(DoubleDouble a, DoubleDouble b) {
  DoubleDouble p = dd_detail::two_prod(a.hi, b.hi);
  p.lo += a.hi * b.lo + a.lo * b.hi;
  return dd_detail::quick_two_sum(p.hi, p.lo);
}

inline DoubleDouble& operator+=(DoubleDouble& a, DoubleDouble b) { return a = a + b; }
inline DoubleDouble& operator-=(DoubleDouble& a, DoubleDouble b) { return a = a - b; }
inline DoubleDouble& operator*=(DoubleDouble& a, DoubleDouble b) { return a = a * b; }

inline double to_double(double x) { return x; }
inline double to_double(DoubleDouble x) { return x.hi + x.lo; }

/// Minimal complex number over a `Real` that need not be a floating type
/// (std::complex is unspecified for those).
template <class Real>
struct BasicComplex {
  Real re{};
  Real im{};

  constexpr BasicComplex() = default;
  constexpr BasicComplex(Real r, Real i) : re(r), im(i) {}
  BasicComplex(Complex z) : re(z.real()), im(z.imag()) {}  // NOLINT

  Complex to_complex() const { return {to_double(re), to_double(im)}; }
  double norm() const {
    double r = to_double(re), i = to_double(im);
    return r * r + i * i;
  }
};

template <class Real>
BasicComplex<Real> operator+(BasicComplex<Real> a, BasicComplex<Real> b) {
  return {a.re + b.re, a.im + b.im};
}

template <class Real>
BasicComplex<Real> operator-(BasicComplex<Real> a, BasicComplex<Real> b) {
  return {a.re - b.re, a.im - b.im};
}

template <class Real>
BasicComplex<Real> operator*(BasicComplex<Real> a, BasicComplex<Real> b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}

template <class Real>
BasicComplex<Real> square(BasicComplex<Real> a) {
  Real t = a.re * a.im;
  return {a.re * a.re - a.im * a.im, t + t};
}

/// Adds a double-precision correction (a Newton step) to a point.
template <class Real>
BasicComplex<Real> shifted(BasicComplex<Real> a, Complex delta) {
  return {a.re + Real(delta.real()), a.im + Real(delta.imag())};
}

}  // namespace carrots
