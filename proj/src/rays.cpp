#include "carrots/rays.hpp"

#include "detail/escape.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

namespace carrots {

namespace {

using detail::AngleOrbit;
using detail::two_pi;

template <class Real>
constexpr double unit_roundoff() {
  if constexpr (std::is_same_v<Real, double>) return std::numeric_limits<double>::epsilon();
  else return 4.93e-32;
}

// Newton continuation along log coordinates h + 2 pi i (theta + offset).
template <class Real>
class Walker {
 public:
  Walker(bool param, Complex c, const AngleOrbit& angle, const TraceOptions& opt)
      : param_(param), c_(c), cd_(c), angle_(angle), opt_(opt) {}

  bool start(double h, double offset) {
    const Complex w = std::exp(Complex(h, two_pi * (angle_.turns() + offset)));
    // Phi(c) = c + 1/2 + O(1/c) and phi_c(z) = z + c/(2z) + O(1/z^3)
    const Complex seed = param_ ? w - 0.5 : w - cd_ / (2.0 * w);
    return solve(BasicComplex<Real>(seed), h, offset, false);
  }

  bool resume(Complex x, double h, double offset) { return solve(BasicComplex<Real>(x), h, offset, false); }

  bool move_to(double h_target, double off_target) {
    const double h_a = h_, off_a = off_;
    const Complex total(h_target - h_a, two_pi * (off_target - off_a));
    if (std::abs(total) == 0.0) return true;
    const double ratio = 1.0001 * (1.0 - std::exp2(-1.0 / std::max(1, opt_.steps_per_halving)));
    double t = 0.0;
    while (t < 1.0) {
      const double h_now = h_a + t * (h_target - h_a);
      double dt = std::min(1.0 - t, ratio * h_now / std::abs(total));
      bool ok = false;
      for (int tries = 0; tries < 12 && !ok; ++tries, dt *= 0.5) {
        const bool last = t + dt >= 1.0 - 1e-12;
        const double t1 = last ? 1.0 : t + dt;
        const double h1 = last ? h_target : h_a + t1 * (h_target - h_a);
        const double off1 = last ? off_target : off_a + t1 * (off_target - off_a);
        const Complex dl(h1 - h_, two_pi * (off1 - off_));
        if (solve(shifted(x_, dl / dg_), h1, off1, true)) {
          ok = true;
          t = t1;
        }
      }
      if (!ok) return false;
    }
    return true;
  }

  Complex point() const { return x_.to_complex(); }
  double h() const { return h_; }
  double offset() const { return off_; }

 private:
  bool solve(BasicComplex<Real> x, double h, double offset, bool check_basin) {
    const double eps = unit_roundoff<Real>();
    Complex step(0.0, 0.0);
    double previous_step = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 48; ++it) {
      auto r = detail::log_residual(param_, c_, x, h, angle_, opt_.potential.escape_radius,
                                    opt_.potential.max_iterations, offset);
      if (!r.escaped) {
        if (it == 0) return false;
        // fell into the filled set: retreat halfway
        step *= 0.5;
        x = shifted(x, -step);
        continue;
      }
      if (it == 0 && check_basin && std::ldexp(std::abs(r.g), r.n) > 1.0) return false;
      const double res = std::abs(r.g);
      step = -r.g / r.dg;
      const double size = std::abs(step);
      const double scale = std::max(std::abs(x.to_complex()), 1e-300);
      const bool converged = res <= 1e-12 * h;
      const bool stalled = size <= 8 * eps * scale || (it >= 6 && size >= 0.5 * previous_step);
      if (converged || stalled) {
        if (res > opt_.tolerance * h) return false;
        x_ = x;
        h_ = h;
        off_ = offset;
        dg_ = r.dg;
        return true;
      }
      previous_step = size;
      x = shifted(x, step);
    }
    return false;
  }

  bool param_;
  BasicComplex<Real> c_;
  Complex cd_;
  const AngleOrbit& angle_;
  const TraceOptions& opt_;
  BasicComplex<Real> x_;
  double h_ = 0.0;
  double off_ = 0.0;
  Complex dg_;
};

// Double precision walker that switches to double-double once on failure.
class Stepper {
 public:
  Stepper(Plane plane, Complex c, const Angle& theta, const TraceOptions& opt)
      : angle_(theta), opt_(opt), param_(plane == Plane::parameter), c_(c) {
    if (opt.precision == Precision::extended) extended_ = std::make_unique<Walker<DoubleDouble>>(param_, c_, angle_, opt_);
    else standard_ = std::make_unique<Walker<double>>(param_, c_, angle_, opt_);
  }

  bool start(double h, double offset) {
    if (extended_) return extended_->start(h, offset);
    if (standard_->start(h, offset)) return true;
    if (!opt_.escalate) return false;
    escalate();
    return extended_->start(h, offset);
  }

  bool move_to(double h, double offset) {
    if (extended_) return extended_->move_to(h, offset);
    if (standard_->move_to(h, offset)) return true;
    if (!opt_.escalate) return false;
    escalate();
    return extended_->resume(standard_->point(), standard_->h(), standard_->offset()) &&
           extended_->move_to(h, offset);
  }

  Complex point() const { return extended_ ? extended_->point() : standard_->point(); }
  unsigned flags() const { return flags_; }

 private:
  void escalate() {
    flags_ |= trace_flags::escalated;
    extended_ = std::make_unique<Walker<DoubleDouble>>(param_, c_, angle_, opt_);
  }

  AngleOrbit angle_;
  const TraceOptions& opt_;
  bool param_;
  Complex c_;
  std::unique_ptr<Walker<double>> standard_;
  std::unique_ptr<Walker<DoubleDouble>> extended_;
  unsigned flags_ = 0;
};

double schedule(const TraceOptions& opt, int j) { return opt.h0 * std::exp2(-static_cast<double>(j) / opt.steps_per_halving); }

RayTrace trace_ray(Plane plane, Complex c, const Angle& theta, const TraceOptions& opt) {
  if (!(opt.h_min > 0.0)) throw std::invalid_argument("trace: h_min must be positive");
  if (opt.steps_per_halving < 1) throw std::invalid_argument("trace: steps_per_halving must be positive");
  RayTrace tr;
  tr.plane = plane;
  tr.c = plane == Plane::dynamical ? c : Complex(0.0, 0.0);
  tr.angle = theta;
  tr.steps_per_halving = opt.steps_per_halving;
  Stepper st(plane, c, theta, opt);
  const double top = std::max(opt.h0, opt.h_min);
  if (!st.start(top, 0.0)) {
    tr.flags = st.flags() | trace_flags::truncated;
    return tr;
  }
  tr.samples.push_back({top, st.point()});
  for (int j = 1; tr.samples.back().h > opt.h_min; ++j) {
    double h = schedule(opt, j);
    if (h < opt.h_min * (1.0 + 1e-12)) h = opt.h_min;
    if (!st.move_to(h, 0.0)) {
      tr.flags |= trace_flags::truncated;
      break;
    }
    tr.samples.push_back({h, st.point()});
  }
  tr.flags |= st.flags();
  Landing est = estimate_landing(tr);
  if (!est.detected) tr.flags |= trace_flags::no_landing;
  if (est.detected && opt.refine_landing && !tr.truncated()) {
    est = refine_landing(plane, c, theta, est);
    if (!est.refined) tr.flags |= trace_flags::unrefined;
  } else {
    tr.flags |= trace_flags::unrefined;
  }
  tr.landing = est;
  return tr;
}

// 1-D Newton helper: f returns (value, derivative).
template <class F>
std::optional<std::pair<Complex, double>> newton_1d(Complex x, F f, int max_iter = 80) {
  const double eps = std::numeric_limits<double>::epsilon();
  double last = std::numeric_limits<double>::infinity();
  for (int it = 0; it < max_iter; ++it) {
    auto [v, d] = f(x);
    if (!std::isfinite(std::abs(v)) || !std::isfinite(std::abs(d)) || std::abs(d) == 0.0) return std::nullopt;
    const Complex step = -v / d;
    x += step;
    const double size = std::abs(step);
    if (size <= 4 * eps * std::max(1.0, std::abs(x)) || (it >= 8 && size >= 0.5 * last && size < 1e-10)) {
      return std::pair{x, std::max(size, eps * std::max(1.0, std::abs(x)))};
    }
    last = size;
  }
  return std::nullopt;
}

}  // namespace

std::string_view to_string(Plane p) { return p == Plane::parameter ? "parameter" : "dynamical"; }

std::string describe_flags(unsigned flags) {
  if (flags == 0) return "ok";
  std::string out;
  auto add = [&](unsigned bit, const char* name) {
    if (!(flags & bit)) return;
    if (!out.empty()) out += '|';
    out += name;
  };
  add(trace_flags::escalated, "escalated");
  add(trace_flags::truncated, "truncated");
  add(trace_flags::no_landing, "no_landing");
  add(trace_flags::unrefined, "unrefined");
  return out;
}

RayTrace trace_dynamic_ray(Complex c, const Angle& theta, const TraceOptions& opt) {
  return trace_ray(Plane::dynamical, c, theta, opt);
}

RayTrace trace_param_ray(const Angle& theta, const TraceOptions& opt) {
  return trace_ray(Plane::parameter, 0.0, theta, opt);
}

Landing estimate_landing(const RayTrace& trace) {
  const auto& s = trace.samples;
  Landing out;
  if (s.empty()) return out;
  out.point = s.back().point;
  if (s.size() == 1) return out;
  out.detected = true;
  out.error = std::abs(s.back().point - s[s.size() - 2].point);

  // Samples at h, 2^P h, 2^2P h, 2^3P h for the last potential h. Near a
  // repelling cycle the tail is geometric only along the period stride.
  const std::size_t m = s.size() - 1;
  int stride = static_cast<int>(std::min<std::size_t>(orbit_shape(trace.angle).period, 64));
  if (3.0 * stride > std::log2(s.front().h / s[m].h) + 1e-9) stride = 1;
  std::size_t idx[3];
  std::size_t from = m;
  for (int k = 0; k < 3; ++k) {
    const double want = s[m].h * std::exp2(stride * (k + 1));
    std::size_t best = from;
    double best_gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = from; i-- > 0;) {
      double gap = std::abs(std::log2(s[i].h / want));
      if (gap < best_gap) {
        best_gap = gap;
        best = i;
      }
      if (s[i].h > 2 * want) break;
    }
    if (best == from || best_gap > 0.01) return out;
    idx[k] = best;
    from = best;
  }
  const Complex z0 = s[idx[2]].point, z1 = s[idx[1]].point, z2 = s[idx[0]].point, z3 = s[m].point;
  const Complex d1 = z1 - z0, d2 = z2 - z1, d3 = z3 - z2;
  if (std::abs(d3) == 0.0) {
    out.error = 0.0;
    return out;
  }
  if (std::abs(d2) == 0.0 || std::abs(d1) == 0.0) return out;
  const Complex r = d3 / d2;
  const double rn = std::abs(r);
  // not yet in the geometric regime when successive ratios disagree
  const bool geometric = std::abs(r - d2 / d1) <= std::max(0.05, 0.5 * (1.0 - rn));
  if (rn >= 1.0 || std::abs(d2 / d1) >= 1.0 || !geometric) {
    out.detected = false;
    out.error = std::abs(d3);
    return out;
  }
  out.point = z3 + d3 * r / (1.0 - r);
  out.error = std::abs(d3) * rn / (1.0 - rn);
  return out;
}

Landing refine_landing(Plane plane, Complex c, const Angle& theta, const Landing& estimate) {
  if (!estimate.detected) return estimate;
  const OrbitShape shape = orbit_shape(theta);
  const int l = static_cast<int>(shape.preperiod);
  const int P = static_cast<int>(shape.period);
  const Complex est = estimate.point;
  const double near = std::max(10.0 * estimate.error, 1e-9 * (1.0 + std::abs(est)));
  Landing out = estimate;

  auto accept = [&](Complex point, double error, double radius) {
    if (std::abs(point - est) > radius) return false;
    out.point = point;
    out.error = error;
    out.refined = true;
    return true;
  };

  if (plane == Plane::parameter && l == 0) {
    // Root of a hyperbolic component: a parabolic cycle of period k | P
    // with multiplier exp(2 pi i r/s), k s = P.
    std::optional<CycleSolution> best;
    for (int k = 1; k <= P; ++k) {
      if (P % k != 0) continue;
      auto rot = rotation_number(theta, static_cast<std::size_t>(k));
      if (!rot || rot->second != P / k) continue;
      const Complex mu = std::polar(1.0, two_pi * rot->first / rot->second);
      // seed the cycle with the critical orbit point that nearly returns after k steps
      Complex w = 0.0, seed = 0.0;
      double best_gap = std::numeric_limits<double>::infinity();
      for (int j = 0; j < 64 * k + 256; ++j) {
        w = w * w + est;
        if (std::abs(w) > 4.0) break;
        Complex v = w;
        for (int i = 0; i < k; ++i) v = v * v + est;
        if (std::abs(v - w) < best_gap) {
          best_gap = std::abs(v - w);
          seed = w;
        }
      }
      CycleSolution sol = solve_cycle_with_multiplier(k, mu, seed, est, 100);
      if (!sol.converged) continue;
      if (!best || std::abs(sol.c - est) < std::abs(best->c - est)) best = sol;
    }
    // Parabolic landings converge slowly, so the extrapolation can be off by far more than its estimate.
    if (best) accept(best->c, std::max(best->residual, 1e-15), std::max(near, 2e-2));
    return out;
  }

  if (plane == Plane::parameter) {
    auto f = [&](Complex cc) {
      Complex w = cc, d = 1.0, wl = 0.0, dl = 0.0;
      for (int j = 0; j < l + P; ++j) {
        if (j == l) {
          wl = w;
          dl = d;
        }
        d = 2.0 * w * d + 1.0;
        w = w * w + cc;
      }
      return std::pair{w - wl, d - dl};
    };
    if (auto r = newton_1d(est, f)) accept(r->first, r->second, near);
    return out;
  }

  // dynamical plane: rays never land on an attracting cycle
  auto repelling = [&](Complex z) {
    for (int j = 0; j < l; ++j) z = z * z + c;
    Complex mult = 1.0;
    for (int j = 0; j < P; ++j) {
      mult *= 2.0 * z;
      z = z * z + c;
    }
    return std::abs(mult) >= 1.0 - 1e-9;
  };
  if (l == 0) {
    try {
      PeriodicPoint pp = periodic_point(c, P, est);
      if (std::abs(pp.multiplier) >= 1.0 - 1e-9) accept(pp.z, std::max(pp.residual, 1e-15), near);
    } catch (const PotentialError&) {
    }
    return out;
  }
  auto f = [&](Complex z) {
    Complex w = z, a = 1.0, wl = 0.0, al = 0.0;
    for (int j = 0; j < l + P; ++j) {
      if (j == l) {
        wl = w;
        al = a;
      }
      a = 2.0 * w * a;
      w = w * w + c;
    }
    return std::pair{w - wl, a - al};
  };
  if (auto r = newton_1d(est, f); r && repelling(r->first)) accept(r->first, r->second, near);
  return out;
}

namespace {

// Newton on Q^P(z) = z; only repelling or parabolic cycles qualify as landing points.
std::optional<PeriodicPoint> landing_cycle_point(Complex c, int P, Complex seed) {
  try {
    PeriodicPoint pp = periodic_point(c, P, seed);
    if (std::abs(pp.multiplier) >= 1.0 - 1e-9) return pp;
  } catch (const PotentialError&) {
  }
  return std::nullopt;
}

// Distances from the lowest samples to z, taken every `stride` halvings of
// the potential, shrink strictly toward the bottom of the trace.
bool tail_approaches(const RayTrace& t, Complex z, int period) {
  const auto& s = t.samples;
  if (s.size() < 2) return false;
  const double range = std::log2(s.front().h / s.back().h);
  const int stride = 3.0 * period <= range + 1e-9 ? period : std::max(1, static_cast<int>(range / 3.0));
  double previous = std::numeric_limits<double>::infinity();
  std::size_t from = 0;
  for (int k = 3; k >= 0; --k) {
    const double want = s.back().h * std::exp2(stride * k);
    std::size_t best = s.size();
    double best_gap = 0.01;
    for (std::size_t i = from; i < s.size(); ++i) {
      const double gap = std::abs(std::log2(s[i].h / want));
      if (gap <= best_gap) {
        best_gap = gap;
        best = i;
      }
    }
    if (best == s.size()) return false;
    const double d = std::abs(s[best].point - z);
    if (!(d < previous)) return false;
    previous = d;
    from = best + 1;
  }
  return true;
}

}  // namespace

Colanding colanding_point(Complex c, const Angle& eta_minus, const Angle& eta_plus, int k, const TraceOptions& opt) {
  TraceOptions o = opt;
  o.refine_landing = false;
  RayTrace tm = trace_dynamic_ray(c, eta_minus, o);
  RayTrace tp = trace_dynamic_ray(c, eta_plus, o);
  auto last = [](const RayTrace& t) { return t.samples.empty() ? Complex() : t.samples.back().point; };
  if (tm.truncated() || tp.truncated() || tm.samples.empty() || tp.samples.empty())
    throw ColandingFailure("co-landing: a dynamical ray did not reach its landing point", last(tm), last(tp));

  const OrbitShape shape = orbit_shape(eta_minus);
  if (shape.preperiod != 0 || orbit_shape(eta_plus).preperiod != 0)
    throw ColandingFailure("co-landing: angles must be periodic", last(tm), last(tp));
  const int P = static_cast<int>(shape.period);
  if (k < 1 || P % k != 0) throw ColandingFailure("co-landing: ray period is not a multiple of k", last(tm), last(tp));

  // The common landing point is a repelling (or parabolic) point of period
  // dividing k. Slow tails near a parabolic cycle never turn geometric, so
  // every tail end and extrapolation serves as a Newton seed and the
  // candidate both tails close in on wins.
  std::vector<Complex> seeds{last(tm), last(tp)};
  for (const RayTrace* t : {&tm, &tp})
    if (t->landing && t->landing->detected) seeds.push_back(t->landing->point);
  std::optional<PeriodicPoint> best;
  double best_reach = std::numeric_limits<double>::infinity();
  for (Complex seed : seeds) {
    auto pp = landing_cycle_point(c, k, seed);
    if (!pp || !tail_approaches(tm, pp->z, P) || !tail_approaches(tp, pp->z, P)) continue;
    const double reach = std::max(std::abs(pp->z - last(tm)), std::abs(pp->z - last(tp)));
    if (reach < best_reach) {
      best_reach = reach;
      best = pp;
    }
  }
  if (!best) throw ColandingFailure("co-landing: the rays do not close in on a common periodic point", last(tm), last(tp));

  Colanding out;
  out.alpha = best->z;
  out.multiplier = best->multiplier;
  out.period = best->exact_period;
  out.residual = best->residual;
  out.landing_minus = tm.landing && tm.landing->detected ? tm.landing->point : last(tm);
  out.landing_plus = tp.landing && tp.landing->detected ? tp.landing->point : last(tp);
  return out;
}

EquipotentialArc equipotential(Plane plane, Complex c, double h, int n_samples, const TraceOptions& opt) {
  if (!(h > 0.0)) throw std::invalid_argument("equipotential: level must be positive");
  if (n_samples < 1) throw std::invalid_argument("equipotential: need at least one sample");
  EquipotentialArc arc;
  arc.plane = plane;
  arc.c = c;
  arc.h = h;
  for (int j = 0; j < n_samples; ++j) {
    PathImage img = map_log_path(plane, c, Angle(j, n_samples), {{h, 0.0}}, opt);
    arc.points.push_back(img.points.front());
    arc.ok.push_back(img.ok.front());
  }
  return arc;
}

PathImage map_log_path(Plane plane, Complex c, const Angle& base, const std::vector<LogPoint>& path,
                       const TraceOptions& opt) {
  PathImage img;
  if (path.empty()) return img;
  for (const LogPoint& p : path)
    if (!(p.h > 0.0)) throw std::invalid_argument("map_log_path: potentials must be positive");
  img.points.assign(path.size(), Complex(std::nan(""), std::nan("")));
  img.ok.assign(path.size(), false);

  Stepper st(plane, c, base, opt);
  const LogPoint& first = path.front();
  bool alive = st.start(std::max(opt.h0, first.h), first.offset);
  for (int j = 1; alive; ++j) {
    const double h = schedule(opt, j);
    if (h <= first.h) break;
    alive = st.move_to(h, first.offset);
  }
  for (std::size_t i = 0; i < path.size() && alive; ++i) {
    alive = st.move_to(path[i].h, path[i].offset);
    if (alive) {
      img.points[i] = st.point();
      img.ok[i] = true;
    }
  }
  img.flags = st.flags() | (alive ? 0u : trace_flags::truncated);
  return img;
}

}  // namespace carrots
