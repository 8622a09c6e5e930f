#include "carrots/carrot_field.hpp"

#include "carrots/pool.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace carrots {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

void check_label(long long p, int n) {
  if (n == 0 && p == 0) return;
  if (n < 1 || n > 60) throw CarrotError("carrot level must be in [0, 60]");
  if (p <= 0 || p >= (1LL << n) || p % 2 == 0) throw CarrotError("carrot label needs odd p with 0 < p < 2^n");
}

struct Edge {
  Complex from;
  Complex to;
};

// Unscaled boundary samples in the coordinates of T.
std::vector<std::pair<Complex, BoundarySample>> model_boundary(const ModelTriangle& t, int density) {
  if (density < 3) throw CarrotError("boundary density must be at least 3 points per edge");
  std::vector<std::pair<Complex, BoundarySample>> out;
  if (t.degenerate) {
    for (int i = 0; i < density; ++i) {
      const Complex u = t.v1 * (static_cast<double>(i) / (density - 1));
      out.push_back({u, {u, i == 0 || i == density - 1, i == 0}});
    }
    return out;
  }
  const Edge edges[3] = {{0.0, t.v1}, {t.v1, t.v2}, {t.v2, 0.0}};
  for (int e = 0; e < 3; ++e)
    for (int i = 0; i < density; ++i) {
      const Complex u = edges[e].from + (edges[e].to - edges[e].from) * (static_cast<double>(i) / density);
      out.push_back({u, {u, i == 0, e == 0 && i == 0}});
    }
  return out;
}

LogPoint to_log_point(Complex u, int n) { return {std::ldexp(u.real(), -n), std::ldexp(u.imag() / two_pi, -n)}; }

double grid(const TraceOptions& opt, int j) { return opt.h0 * std::exp2(-static_cast<double>(j) / opt.steps_per_halving); }

CarrotSample map_carrot(Plane plane, Complex c, const ModelTriangle& t, long long p, int n, int density,
                        const CarrotOptions& opt) {
  const ModelCarrot carrot = model_carrot(t, p, n);
  const auto boundary = model_boundary(t, density);
  TraceOptions to = opt.trace;
  if (n >= opt.extended_from_level) to.precision = Precision::extended;
  const Angle base = carrot.angle();

  CarrotSample out;
  out.p = p;
  out.n = n;
  out.plane = plane;
  out.c = plane == Plane::dynamical ? c : Complex(0.0, 0.0);

  auto map_path = [&](const std::vector<Complex>& us, std::vector<RaySample>* on_ray) {
    std::vector<LogPoint> path;
    path.reserve(us.size());
    for (Complex u : us) path.push_back(to_log_point(u, n));
    PathImage img = map_log_path(plane, c, base, path, to);
    out.flags |= img.flags;
    for (std::size_t i = 0; i < us.size(); ++i) {
      if (!img.ok[i]) continue;
      out.boundary_points.push_back(img.points[i]);
      if (on_ray) on_ray->push_back({path[i].h, img.points[i]});
    }
  };

  if (t.degenerate) {
    // One path down the stick; below the lowest sample it follows the ray
    // on the trace grid, which doubles as the tip trace.
    std::vector<Complex> us;
    for (auto it = boundary.rbegin(); it != boundary.rend(); ++it)
      if (!it->second.tip) us.push_back(it->first);
    const double lowest = std::ldexp(us.back().real(), -n);
    std::size_t grid_start = us.size();
    int j = static_cast<int>(std::floor(std::log2(to.h0 / lowest) * to.steps_per_halving));
    for (;; ++j) {
      const double h = grid(to, j);
      if (h >= lowest * (1 - 1e-12)) continue;
      if (h < opt.tip_floor * (1 - 1e-12)) break;
      us.push_back(Complex(std::ldexp(h, n), 0.0));
    }
    std::vector<RaySample> all;
    map_path(us, &all);
    RayTrace tail;
    tail.plane = plane;
    tail.c = out.c;
    tail.angle = base;
    tail.steps_per_halving = to.steps_per_halving;
    for (const RaySample& s : all)
      if (s.h < lowest * (1 - 1e-12)) tail.samples.push_back(s);
    const bool usable = grid_start < us.size() && tail.samples.size() == us.size() - grid_start;
    Landing landing;
    if (usable) {
      landing = estimate_landing(tail);
      if (landing.detected) landing = refine_landing(plane, c, base, landing);
    } else {
      TraceOptions tip_opt = to;
      tip_opt.h_min = opt.tip_floor;
      RayTrace full = plane == Plane::parameter ? trace_param_ray(base, tip_opt) : trace_dynamic_ray(c, base, tip_opt);
      out.flags |= full.flags & (trace_flags::escalated | trace_flags::truncated);
      landing = full.landing.value_or(Landing{});
    }
    if (!landing.detected) out.flags |= carrot_flags::no_landing;
    if (!landing.refined) out.flags |= carrot_flags::unrefined;
    out.tip = landing.point;
    out.tip_error = landing.error;
  } else {
    auto refine_edge = [&](Complex v, double s_min, std::vector<Complex>& us) {
      for (int j = 1;; ++j) {
        const double s = s_min * std::exp2(-j / 8.0);
        if (std::ldexp(s * v.real(), -n) < opt.tip_floor) break;
        us.push_back(s * v);
      }
    };
    const double s_min = 1.0 / density;
    // v1 down to the tip
    std::vector<Complex> a;
    for (int i = density; i >= 1; --i) a.push_back(t.v1 * (static_cast<double>(i) / density));
    refine_edge(t.v1, s_min, a);
    map_path(a, nullptr);
    // v1 across to v2, then down to the tip
    std::vector<Complex> b;
    for (int i = 1; i <= density; ++i) b.push_back(t.v1 + (t.v2 - t.v1) * (static_cast<double>(i) / density));
    for (int i = density - 1; i >= 1; --i) b.push_back(t.v2 * (static_cast<double>(i) / density));
    refine_edge(t.v2, s_min, b);
    map_path(b, nullptr);

    TraceOptions tip_opt = to;
    tip_opt.h_min = opt.tip_floor;
    RayTrace full = plane == Plane::parameter ? trace_param_ray(base, tip_opt) : trace_dynamic_ray(c, base, tip_opt);
    out.flags |= full.flags;
    Landing landing = full.landing.value_or(Landing{});
    out.tip = landing.point;
    out.tip_error = landing.error;
  }
  out.diameter = carrot_diameter(out.boundary_points, out.tip);
  return out;
}

}  // namespace

ModelTriangle ModelTriangle::stick(double length) {
  if (!(length > 0.0) || !std::isfinite(length)) throw CarrotError("stick length must be positive");
  return {Complex(length, 0.0), Complex(length, 0.0), true};
}

ModelTriangle ModelTriangle::triangle(Complex v1, Complex v2) {
  if (v1.real() < 0.0 || v2.real() < 0.0 || v1 == 0.0 || v2 == 0.0)
    throw CarrotError("triangle vertices must lie in the closed right half-plane");
  const double top = std::max({0.0, v1.imag(), v2.imag()});
  const double bottom = std::min({0.0, v1.imag(), v2.imag()});
  if (top - bottom >= two_pi) throw CarrotError("triangle height must stay below 2 pi");
  if (v1 == v2) return stick(std::abs(v1));
  if (v1.imag() < v2.imag()) std::swap(v1, v2);  // keep v1 the upper vertex
  return {v1, v2, false};
}

double ModelTriangle::log_length() const { return std::max(v1.real(), v2.real()); }

Complex ModelCarrot::place(Complex zeta) const {
  return std::ldexp(1.0, -n) * (zeta + Complex(0.0, two_pi * static_cast<double>(p)));
}

Angle ModelCarrot::angle() const { return n == 0 ? Angle(0, 1) : Angle(BigInt(p), BigInt(1) << n); }

Complex ModelCarrot::vertex(int i) const {
  if (i == 0) return place(0.0);
  return place(i == 1 ? shape.v1 : shape.v2);
}

ModelCarrot model_carrot(const ModelTriangle& t, long long p, int n) {
  check_label(p, n);
  return {t, p, n};
}

std::vector<BoundarySample> sample_model_boundary(const ModelCarrot& carrot, int density) {
  std::vector<BoundarySample> out;
  for (auto& [u, s] : model_boundary(carrot.shape, density)) {
    BoundarySample placed = s;
    placed.log_point = carrot.place(u);
    out.push_back(placed);
  }
  return out;
}

int default_density(const ModelTriangle& t) {
  double longest = std::abs(t.v1);
  if (!t.degenerate) longest = std::max({longest, std::abs(t.v2), std::abs(t.v2 - t.v1)});
  return std::max(16, static_cast<int>(std::ceil(64.0 * longest)));
}

CarrotSample map_carrot_param(const ModelTriangle& t, long long p, int n, int density, const CarrotOptions& opt) {
  return map_carrot(Plane::parameter, 0.0, t, p, n, density, opt);
}

CarrotSample map_carrot_dynamic(Complex c, const ModelTriangle& t, long long p, int n, int density,
                                const CarrotOptions& opt) {
  return map_carrot(Plane::dynamical, c, t, p, n, density, opt);
}

double carrot_diameter(const std::vector<Complex>& points, Complex tip) {
  double best = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    best = std::max(best, std::abs(points[i] - tip));
    for (std::size_t j = i + 1; j < points.size(); ++j) best = std::max(best, std::abs(points[i] - points[j]));
  }
  return best;
}

std::vector<long long> select_labels(const LabelFilter& filter, int n) {
  check_label(1, n);
  const long long top = 1LL << n;
  std::vector<long long> out;
  switch (filter.kind) {
    case LabelFilter::Kind::all:
      for (long long p = 1; p < top; p += 2) out.push_back(p);
      break;
    case LabelFilter::Kind::nearest: {
      const Rational x = filter.target.rational() * Rational(top);
      const BigInt fl = boost::multiprecision::numerator(x) / boost::multiprecision::denominator(x);
      long long p0 = fl.convert_to<long long>();
      long long lo = p0 % 2 ? p0 : p0 - 1, hi = lo + 2;
      lo = std::clamp(lo, 1LL, top - 1);
      hi = std::clamp(hi, 1LL, top - 1);
      Rational dlo = abs(x - Rational(lo)), dhi = abs(x - Rational(hi));
      out.push_back(dhi < dlo ? hi : lo);
      break;
    }
    case LabelFilter::Kind::list:
      for (long long p : filter.labels)
        if (p > 0 && p < top && p % 2 == 1) out.push_back(p);
      std::sort(out.begin(), out.end());
      out.erase(std::unique(out.begin(), out.end()), out.end());
      break;
  }
  return out;
}

ShrinkTable shrink_experiment(const ModelTriangle& t, int n_first, int n_last, const LabelFilter& filter, int density,
                              const CarrotOptions& opt, int parallelism) {
  if (n_first < 1 || n_last < n_first) throw CarrotError("shrink experiment needs a nonempty level range from 1");
  ShrinkTable table;
  for (int n = n_first; n <= n_last; ++n)
    for (long long p : select_labels(filter, n)) table.rows.push_back({p, n, {}, 0.0, 0});
  parallel_for(table.rows.size(), parallelism, [&](std::size_t i) {
    ShrinkRow& row = table.rows[i];
    CarrotSample s = map_carrot_param(t, row.p, row.n, density, opt);
    row.tip = s.tip;
    row.diameter = s.diameter;
    row.flags = s.flags;
  });
  for (int n = n_first; n <= n_last; ++n) {
    LevelSummary sum;
    sum.n = n;
    for (const ShrinkRow& r : table.rows) {
      if (r.n != n) continue;
      ++sum.count;
      sum.flags |= r.flags;
      if (r.diameter > sum.max_diameter) {
        sum.max_diameter = r.diameter;
        sum.argmax_p = r.p;
      }
    }
    table.levels.push_back(sum);
  }
  return table;
}

}  // namespace carrots
