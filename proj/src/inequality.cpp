#include "carrots/inequality.hpp"

#include "carrots/carrot_field.hpp"
#include "carrots/pool.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <random>

namespace carrots {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double two_pi = 2.0 * pi;
const double ln2 = std::log(2.0);

void check_rotation(int p, int q) {
  if (q < 2 || p <= 0 || p >= q || std::gcd(p, q) != 1)
    throw InequalityError("rotation number must be a reduced p/q with 0 < p < q");
}

// Odd numerators n at level `level` with n/2^level in [a, b].
std::vector<long long> dyadics_between(const Rational& a, const Rational& b, int level) {
  const Rational scale = Rational(BigInt(1) << level);
  const Rational lo = a * scale, hi = b * scale;
  BigInt first = boost::multiprecision::numerator(lo) / boost::multiprecision::denominator(lo);
  if (Rational(first) < lo) ++first;
  const BigInt last = boost::multiprecision::numerator(hi) / boost::multiprecision::denominator(hi);
  std::vector<long long> out;
  for (BigInt n = first; n <= last; ++n)
    if (n % 2 == 1) out.push_back(n.convert_to<long long>());
  return out;
}

double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1p-53; }

}  // namespace

double angle_of_vision(Complex P, const Angle& eta_minus, const Angle& eta_plus) {
  if (!(P.real() > 0.0)) throw InequalityError("angle_of_vision needs Re P > 0");
  if (!(eta_minus < eta_plus) || eta_minus.is_zero()) throw InequalityError("angle_of_vision needs 0 < eta- < eta+ < 1");
  const Complex a = Complex(0.0, two_pi * eta_minus.to_double()) - P;
  const Complex b = Complex(0.0, two_pi * eta_plus.to_double()) - P;
  return std::abs(std::arg(b / a));
}

double vision_floor(const ComponentDescriptor& h) {
  return std::atan(two_pi * std::ldexp(1.0, h.m_prime - 2 * h.period));
}

ModulusPair torus_moduli(Complex Lambda, int p, int q, int k) {
  if (q <= 0 || k <= 0) throw InequalityError("torus_moduli needs positive q and k");
  const Complex L = static_cast<double>(q) * Lambda - Complex(0.0, two_pi * p);
  if (std::abs(L) == 0.0) throw InequalityError("torus_moduli: L = 0 (parabolic)");
  return {two_pi * std::cos(std::arg(L)) / (q * std::abs(L)), pi / (k * q * ln2)};
}

bool grotzsch_holds(const ModulusPair& m, double slack) { return m.mod_A_o <= m.mod_T_gamma + slack; }

InequalityReport yoccoz_levin_check(Complex c, const ComponentDescriptor& h, int p, int q,
                                    const InequalityOptions& opt) {
  check_rotation(p, q);
  InequalityReport r;
  r.c = c;
  r.component = h;
  r.p = p;
  r.q = q;
  std::tie(r.eta_minus, r.eta_plus) = relative_wake_angles(h, p, q);
  const int k = h.period;

  Colanding col = colanding_point(c, r.eta_minus, r.eta_plus, k, opt.trace);
  r.alpha_prime = col.alpha;
  r.lambda = col.multiplier;
  r.colanding_residual = col.residual;
  r.repelling = std::abs(r.lambda) > 1.0 + 1e-9;
  r.Lambda = multiplier_log_branch(r.lambda, p, q);
  const Complex d = r.Lambda - Complex(0.0, two_pi * p / q);
  r.lhs = std::abs(d);
  r.theta = r.lhs == 0.0 ? 0.0 : std::arg(d);

  r.omega = pi;
  if (green_param(c).escaped) {
    LogBottcher lb = log_bottcher_param(c);
    if (lb.valid && lb.value.real() > 0.0) {
      // representative of Im Log phi_c(c) centred on the wake's interval
      const double mid = pi * (r.eta_minus.to_double() + r.eta_plus.to_double());
      const double im = mid + std::remainder(lb.value.imag() - mid, two_pi);
      r.log_phi = Complex(lb.value.real(), im);
      if (!opt.classical) r.omega = angle_of_vision(r.log_phi, r.eta_minus, r.eta_plus);
      r.outside_m = true;
    }
  }
  r.rhs = 2.0 * k * ln2 * std::max(0.0, std::cos(r.theta)) / q * (pi / r.omega);
  r.slack = r.rhs * opt.slack_relative + opt.slack_absolute;
  r.pass = r.lhs <= r.rhs + r.slack;
  try {
    r.moduli = torus_moduli(r.Lambda, p, q, k);
  } catch (const InequalityError&) {
    r.moduli = {};
  }
  return r;
}

LimbTable limb_scaling_experiment(const ComponentDescriptor& h, int q_max, const LimbOptions& opt, int parallelism) {
  if (q_max < 2) throw InequalityError("limb scaling needs q_max >= 2");
  LimbTable table;
  for (int q = 2; q <= q_max; ++q)
    for (int p = 1; p < q; ++p)
      if (std::gcd(p, q) == 1) table.rows.push_back({p, q});

  parallel_for(table.rows.size(), parallelism, [&](std::size_t i) {
    LimbRow& row = table.rows[i];
    std::tie(row.eta_minus, row.eta_plus) = relative_wake_angles(h, row.p, row.q);
    std::vector<Complex> points;
    for (const Angle& eta : {row.eta_minus, row.eta_plus}) {
      RayTrace t = trace_param_ray(eta, opt.trace);
      row.flags |= t.flags;
      for (const RaySample& s : t.samples)
        if (s.h <= opt.h_probe) points.push_back(s.point);
      if (t.landing) points.push_back(t.landing->point);
      if (eta == row.eta_minus && t.landing) row.root = t.landing->point;
    }
    const Dyadic first = smallest_denominator_dyadic(row.eta_minus.rational(), row.eta_plus.rational());
    for (int n = first.m; n <= first.m + opt.extra_levels; ++n) {
      for (long long num : dyadics_between(row.eta_minus.rational(), row.eta_plus.rational(), n)) {
        RayTrace t = trace_param_ray(Angle(BigInt(num), BigInt(1) << n), opt.trace);
        row.flags |= t.flags;
        if (!t.landing) continue;
        points.push_back(t.landing->point);
        ++row.tips;
      }
    }
    row.extent = carrot_diameter(points, row.root);
    row.scaled = row.extent * row.q;
  });

  std::map<int, double> per_q;
  for (const LimbRow& row : table.rows) {
    table.empirical_c = std::max(table.empirical_c, row.scaled);
    per_q[row.q] = std::max(per_q[row.q], row.scaled);
  }
  double lo = INFINITY, hi = 0.0;
  for (auto& [q, v] : per_q) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  table.spread = hi / lo;
  return table;
}

const char* to_string(WakeSample::Kind kind) {
  switch (kind) {
    case WakeSample::Kind::center: return "center";
    case WakeSample::Kind::interior: return "interior";
    case WakeSample::Kind::stick: return "stick";
  }
  return "?";
}

Complex satellite_center(int k, Complex center, int p, int q) {
  const Complex mu = std::polar(1.0, two_pi * p / q);
  const Complex root = component_point(k, center, mu).c;
  const Complex inner = component_point(k, center, 0.97 * mu).c;
  const Complex dir = (root - inner) / std::abs(root - inner);
  const double radius = std::abs(root - center);
  for (double s : {1.0, 0.5, 2.0, 0.25, 4.0, 0.125}) {
    Complex seed = root + dir * (s * radius / (q * q));
    Complex found;
    try {
      found = component_center(k * q, seed);
    } catch (const NewtonFailure&) {
      continue;
    }
    // exact period k q, and the component's root is the parent's boundary point
    bool exact = true;
    Complex z = 0.0;
    for (int j = 1; j < k * q; ++j) {
      z = z * z + found;
      if (std::abs(z) < 1e-9) exact = false;
    }
    if (!exact) continue;
    try {
      const Complex near_root = component_point(k * q, found, 0.9999).c;
      if (std::abs(near_root - root) < 0.05 * std::abs(found - root)) return found;
    } catch (const NewtonFailure&) {
    }
  }
  throw InequalityError("satellite_center: no center found");
}

std::vector<WakeSample> sample_wake(int p, int q, int count, std::uint64_t seed) {
  check_rotation(p, q);
  std::mt19937_64 rng(seed);
  struct Comp {
    int period;
    Complex center;
  };
  std::vector<Comp> comps;
  const Complex main_sat = satellite_center(1, 0.0, p, q);
  comps.push_back({q, main_sat});
  for (auto [a, b] : {std::pair{1, 2}, std::pair{1, 3}, std::pair{2, 3}})
    comps.push_back({q * b, satellite_center(q, main_sat, a, b)});

  std::vector<WakeSample> out;
  for (const Comp& comp : comps) {
    if (static_cast<int>(out.size()) >= count) return out;
    out.push_back({WakeSample::Kind::center, comp.center, p, q, comp.period});
  }
  const int remaining = count - static_cast<int>(out.size());
  const int interior = remaining / 2;
  for (int i = 0; i < interior; ++i) {
    const Comp& comp = comps[static_cast<std::size_t>(i) % comps.size()];
    const double rho = 0.9 * std::sqrt(unit(rng));
    const Complex mu = std::polar(rho, two_pi * unit(rng));
    out.push_back({WakeSample::Kind::interior, component_point(comp.period, comp.center, mu).c, p, q, comp.period});
  }

  const auto [em, ep] = wake_angles(p, q);
  const Dyadic first = smallest_denominator_dyadic(em.rational(), ep.rational());
  std::vector<Angle> labels;
  for (int n = first.m; n <= first.m + 2; ++n)
    for (long long num : dyadics_between(em.rational(), ep.rational(), n)) labels.emplace_back(BigInt(num), BigInt(1) << n);
  for (int i = 0; static_cast<int>(out.size()) < count && i < 100 * count; ++i) {
    const Angle& label = labels[static_cast<std::size_t>(i) % labels.size()];
    const int level = static_cast<int>(msb(label.denominator()));
    const double h = std::ldexp(0.5, -level) * (0.05 + 0.95 * unit(rng));
    PathImage img = map_log_path(Plane::parameter, 0.0, label, {{h, 0.0}});
    if (!img.ok[0]) continue;
    out.push_back({WakeSample::Kind::stick, img.points[0], p, q, 0});
  }
  return out;
}

}  // namespace carrots
