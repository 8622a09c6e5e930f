#include "carrots/potential.hpp"

#include "detail/escape.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace carrots {

namespace {

using detail::two_pi;
constexpr double eps = std::numeric_limits<double>::epsilon();

// Radius beyond which the product formula for phi_c with principal
// branches is safe: |c / z_j^2| <= 1/16 along the whole orbit.
double safe_radius(Complex c) { return 4.0 * std::max(1.0, std::sqrt(std::abs(c))); }

Complex product_log_bottcher(Complex c, Complex z) {
  Complex sum = std::log(z);
  double weight = 0.5;
  for (int j = 0; j < 64 && weight > 1e-300; ++j) {
    Complex u = c / (z * z);
    if (std::abs(u) < 1e-18) {
      sum += weight * u;
      break;
    }
    sum += weight * std::log(1.0 + u);
    z = z * z + c;
    weight *= 0.5;
  }
  return sum;
}

double normalized_turn(double a) {
  a = std::fmod(a, two_pi);
  return a < 0 ? a + two_pi : a;
}

// Walks z outward along its dynamical ray until |z| >= safe_radius(c).
// Returns the far point and the accumulated imaginary drift.
template <class Real>
std::optional<std::pair<Complex, double>> continue_outward(Complex c, Complex z, const PotentialOptions& opt) {
  const BasicComplex<Real> cr(c);
  BasicComplex<Real> x(z);
  double drift = 0.0;
  const double target = safe_radius(c);
  for (int step = 0; step < 4000; ++step) {
    if (std::abs(x.to_complex()) >= target) return std::pair{x.to_complex(), drift};
    auto e = detail::escape_orbit(cr, x, false, opt.escape_radius, opt.max_iterations);
    if (!e.escaped) return std::nullopt;
    const int n = e.n;
    const Complex zn = e.z.to_complex();
    const double scale = std::ldexp(1.0, -n);
    const double g = scale * std::log(std::abs(zn));
    const double delta = std::min(0.1 * g, 0.25);
    // tangent predictor, then Newton on 2^-n Log(z'_n / z_n) = delta
    BasicComplex<Real> y = shifted(x, delta / (scale * e.dz / zn));
    bool ok = false;
    for (int it = 0; it < 40; ++it) {
      BasicComplex<Real> w = y;
      Complex dw(1.0, 0.0);
      for (int j = 0; j < n; ++j) {
        dw = 2.0 * w.to_complex() * dw;
        w = square(w) + cr;
      }
      const Complex wn = w.to_complex();
      if (!std::isfinite(wn.real()) || !std::isfinite(wn.imag()) || !std::isfinite(dw.real())) break;
      const Complex f = scale * std::log(wn / zn) - delta;
      const Complex df = scale * dw / wn;
      const Complex step_y = -f / df;
      y = shifted(y, step_y);
      if (std::abs(f) <= 1e-13 * delta || std::abs(step_y) <= 8 * eps * std::abs(y.to_complex())) {
        drift += std::abs(f.imag());
        ok = true;
        break;
      }
    }
    if (!ok) return std::nullopt;
    x = y;
  }
  return std::nullopt;
}

}  // namespace

PotentialResult green_dynamic(Complex c, Complex z, double target_error, const PotentialOptions& opt) {
  const double r2 = opt.escape_radius * opt.escape_radius;
  PotentialResult r;
  int n = 0;
  for (; n < opt.max_iterations && std::norm(z) <= r2; ++n) z = z * z + c;
  if (std::norm(z) <= r2) {
    r.iterations_used = n;
    return r;
  }
  auto tail = [&](Complex w) {
    const double a2 = std::norm(w);
    return std::abs(c) * std::abs(c) / (a2 * a2) + std::abs(c) / (a2 * a2);
  };
  // Extra iterations shrink the truncation term squarely; stop well before overflow.
  while (std::ldexp(tail(z), -n) > target_error && std::norm(z) < 1e280) {
    z = z * z + c;
    ++n;
  }
  const double lz = std::log(std::abs(z));
  r.escaped = true;
  r.iterations_used = n;
  r.value = std::ldexp(lz + (c / (2.0 * z * z)).real(), -n);
  r.error_bound = std::ldexp(tail(z) + 4.0 * eps * lz, -n);
  return r;
}

PotentialResult green_param(Complex c, double target_error, const PotentialOptions& opt) {
  return green_dynamic(c, c, target_error, opt);
}

LogBottcher log_bottcher_dynamic(Complex c, Complex z, const PotentialOptions& opt) {
  LogBottcher out;
  PotentialResult g = green_dynamic(c, z, 1e-16, opt);
  if (!g.escaped) return out;
  PotentialResult g0 = green_dynamic(c, 0.0, 1e-16, opt);
  if (g0.escaped && g.value <= g0.value * (1.0 + 1e-12)) return out;

  Complex far = z;
  double drift = 0.0;
  if (std::abs(z) < safe_radius(c)) {
    auto walked = continue_outward<double>(c, z, opt);
    if (!walked) walked = continue_outward<DoubleDouble>(c, z, opt);
    if (!walked) return out;
    std::tie(far, drift) = *walked;
  }
  const Complex far_log = product_log_bottcher(c, far);
  out.value = Complex(g.value, normalized_turn(far_log.imag()));
  out.error_bound = g.error_bound + drift + 8 * eps * std::abs(far_log);
  out.valid = true;
  return out;
}

LogBottcher log_bottcher_param(Complex c, const PotentialOptions& opt) { return log_bottcher_dynamic(c, c, opt); }

PhiValue phi_param(Complex c, const PotentialOptions& opt) {
  LogBottcher lb = log_bottcher_param(c, opt);
  if (!lb.valid) throw PotentialError("phi_param: parameter does not escape within the iteration budget");
  auto e = detail::escape_orbit(BasicComplex<double>(c), BasicComplex<double>(c), true, opt.escape_radius,
                                opt.max_iterations);
  const Complex value = std::exp(lb.value);
  const Complex zn = e.z.to_complex();
  return {value, value * std::ldexp(1.0, -e.n) * e.dz / zn};
}

Complex psi_param(Complex w, Complex seed, const PotentialOptions& opt) {
  if (std::abs(w) <= 1.0) throw PotentialError("psi_param needs |w| > 1");
  const double h = std::log(std::abs(w));
  const auto angle = detail::AngleOrbit::approximate(std::arg(w) / two_pi);
  BasicComplex<double> x(seed);
  double residual = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 80; ++it) {
    auto r = detail::log_residual(true, x, x, h, angle, opt.escape_radius, opt.max_iterations);
    if (!r.escaped) throw NewtonFailure("psi_param: iterate fell into M", x.to_complex(), residual);
    residual = std::abs(r.g);
    if (residual <= 5e-13) return x.to_complex();
    Complex step = -r.g / r.dg;
    // damp steps that would land in M
    for (int halve = 0; halve < 20; ++halve) {
      auto trial = shifted(x, step);
      if (detail::escape_orbit(trial, trial, true, opt.escape_radius, opt.max_iterations).escaped) break;
      step *= 0.5;
    }
    x = shifted(x, step);
    if (std::abs(step) <= 4 * eps * std::abs(x.to_complex()) && residual <= 1e-12) return x.to_complex();
  }
  throw NewtonFailure("psi_param: no convergence", x.to_complex(), residual);
}

PeriodicPoint periodic_point(Complex c, int k, Complex seed, double tol) {
  if (k < 1) throw PotentialError("periodic_point: period must be positive");
  Complex z = seed;
  auto iterate = [&](Complex w, int m, Complex& lambda) {
    lambda = 1.0;
    for (int j = 0; j < m; ++j) {
      lambda *= 2.0 * w;
      w = w * w + c;
    }
    return w;
  };
  double residual = std::numeric_limits<double>::infinity();
  Complex lambda;
  bool ok = false;
  for (int it = 0; it < 100; ++it) {
    Complex f = iterate(z, k, lambda) - z;
    residual = std::abs(f);
    const double scale = std::max(1.0, std::abs(z));
    if (!std::isfinite(residual)) break;
    if (residual <= tol * scale) {
      ok = true;
      break;
    }
    Complex step = -f / (lambda - 1.0);
    z += step;
    if (std::abs(step) <= 4 * eps * scale) {
      Complex fz = iterate(z, k, lambda) - z;
      residual = std::abs(fz);
      ok = residual <= std::max(tol, 16 * eps * (1.0 + std::abs(lambda))) * scale;
      break;
    }
  }
  if (!ok) throw NewtonFailure("periodic_point: no convergence", z, residual);
  PeriodicPoint out;
  out.z = z;
  out.residual = residual;
  iterate(z, k, out.multiplier);
  out.exact_period = k;
  for (int d = 1; d < k; ++d) {
    if (k % d != 0) continue;
    Complex ld;
    if (std::abs(iterate(z, d, ld) - z) <= 100 * std::max(tol, residual) * std::max(1.0, std::abs(z))) {
      out.exact_period = d;
      break;
    }
  }
  return out;
}

Complex multiplier_log_branch(Complex lambda, int p, int q) {
  if (q <= 0) throw PotentialError("multiplier_log_branch: q must be positive");
  const double low = two_pi * p / q - std::numbers::pi;
  double a = std::arg(lambda);
  a = low + std::fmod(std::fmod(a - low, two_pi) + two_pi, two_pi);
  if (a >= low + two_pi) a -= two_pi;
  return {std::log(std::abs(lambda)), a};
}

Complex component_center(int k, Complex seed, double tol) {
  Complex c = seed;
  double residual = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 200; ++it) {
    Complex z = 0.0, dz = 0.0;
    for (int j = 0; j < k; ++j) {
      dz = 2.0 * z * dz + 1.0;
      z = z * z + c;
    }
    residual = std::abs(z);
    if (residual <= tol) return c;
    Complex step = -z / dz;
    c += step;
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) break;
    if (std::abs(step) <= 4 * eps * std::max(1.0, std::abs(c)) && residual <= 1e3 * tol) return c;
  }
  throw NewtonFailure("component_center: no convergence", c, residual);
}

CycleSolution solve_cycle_with_multiplier(int k, Complex mu, Complex z_seed, Complex c_seed, int max_iter) {
  CycleSolution s{z_seed, c_seed, std::numeric_limits<double>::infinity(), false};
  for (int it = 0; it < max_iter; ++it) {
    Complex w = s.z, a = 1.0, b = 0.0, ds = 0.0, dt = 0.0;
    for (int j = 0; j < k; ++j) {
      const Complex a1 = 2.0 * w * a;
      const Complex b1 = 2.0 * w * b + 1.0;
      const Complex s1 = 2.0 * (a * a + w * ds);
      const Complex t1 = 2.0 * (b * a + w * dt);
      a = a1;
      b = b1;
      ds = s1;
      dt = t1;
      w = w * w + s.c;
    }
    const Complex f1 = w - s.z, f2 = a - mu;
    s.residual = std::abs(f1) + std::abs(f2);
    if (!std::isfinite(s.residual)) return s;
    if (s.residual <= 1e-13 * std::max(1.0, std::abs(s.z))) {
      s.converged = true;
      return s;
    }
    // [a-1  b ] [dz]   [f1]
    // [ds   dt] [dc] = [f2]
    const Complex det = (a - 1.0) * dt - b * ds;
    if (std::abs(det) == 0.0) return s;
    const Complex dz = (f1 * dt - b * f2) / det;
    const Complex dc = ((a - 1.0) * f2 - ds * f1) / det;
    s.z -= dz;
    s.c -= dc;
    if (std::abs(dz) + std::abs(dc) <= 8 * eps * (1.0 + std::abs(s.z) + std::abs(s.c))) {
      s.converged = s.residual <= 1e-9;
      return s;
    }
  }
  return s;
}

InteriorPoint component_point(int k, Complex center, Complex mu) {
  if (std::abs(mu) > 1.0 + 1e-12) throw PotentialError("component_point: |mu| must be at most 1");
  if (std::abs(mu) == 0.0) return {center, 0.0};
  const int steps = 8 + static_cast<int>(std::ceil(64.0 * std::abs(mu)));
  Complex z = 0.0, c = center;
  for (int j = 1; j <= steps; ++j) {
    CycleSolution s = solve_cycle_with_multiplier(k, mu * (static_cast<double>(j) / steps), z, c);
    if (!s.converged) throw NewtonFailure("component_point: continuation failed", s.c, s.residual);
    z = s.z;
    c = s.c;
  }
  return {c, z};
}

}  // namespace carrots
