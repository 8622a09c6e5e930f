#pragma once

// Dyadic carrot (and stick) fields: model regions in logarithmic
// coordinates, their images under Psi or psi_c, and diameter experiments.

#include "carrots/rays.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace carrots {

class CarrotError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Closed triangle with vertices 0, v1, v2 in log coordinates. A stick is
/// the degenerate case v1 = v2 = length on the positive real axis.
struct ModelTriangle {
  Complex v1;
  Complex v2;
  bool degenerate = false;

  static ModelTriangle stick(double length);
  static ModelTriangle triangle(Complex v1, Complex v2);
  double log_length() const;  // largest real part
};

/// The region 2^-n (T + 2 pi i p) (n = 0 is T itself).
struct ModelCarrot {
  ModelTriangle shape;
  long long p = 0;
  int n = 0;

  Complex place(Complex zeta) const;  // 2^-n (zeta + 2 pi i p)
  Angle angle() const;                // p / 2^n
  Complex vertex(int i) const;        // 0: the tip, 1: v1, 2: v2 (scaled)
};

ModelCarrot model_carrot(const ModelTriangle& t, long long p, int n);

struct BoundarySample {
  Complex log_point;
  bool vertex = false;
  bool tip = false;  // the dyadic point itself; mapped by ray landing, not by Psi
};

/// Points per edge, each edge starting at its first vertex (tip, v1, v2).
std::vector<BoundarySample> sample_model_boundary(const ModelCarrot& carrot, int density);

/// 64 points per unit of the longest edge, at least 16.
int default_density(const ModelTriangle& t);

namespace carrot_flags {
inline constexpr unsigned escalated = trace_flags::escalated;
inline constexpr unsigned truncated = trace_flags::truncated;
inline constexpr unsigned no_landing = trace_flags::no_landing;
inline constexpr unsigned unrefined = trace_flags::unrefined;
}  // namespace carrot_flags

struct CarrotOptions {
  TraceOptions trace;
  /// Geometric refinement toward the tip stops at this potential.
  double tip_floor = std::ldexp(1.0, -30);
  /// Levels at or above this use double-double from the start.
  int extended_from_level = 14;
};

struct CarrotSample {
  long long p = 0;
  int n = 0;
  Plane plane = Plane::parameter;
  Complex c;  // dynamical plane only
  std::vector<Complex> boundary_points;
  Complex tip;
  double tip_error = 0.0;
  double diameter = 0.0;
  unsigned flags = 0;
};

CarrotSample map_carrot_param(const ModelTriangle& t, long long p, int n, int density, const CarrotOptions& opt = {});
CarrotSample map_carrot_dynamic(Complex c, const ModelTriangle& t, long long p, int n, int density,
                                const CarrotOptions& opt = {});

/// Largest pairwise distance over points and tip.
double carrot_diameter(const std::vector<Complex>& points, Complex tip);

struct LabelFilter {
  enum class Kind { all, nearest, list } kind = Kind::all;
  Angle target;                  // nearest
  std::vector<long long> labels;  // list: numerators, applied at every level

  static LabelFilter every() { return {}; }
  static LabelFilter nearest_to(const Angle& a) { return {Kind::nearest, a, {}}; }
  static LabelFilter only(std::vector<long long> ps) { return {Kind::list, {}, std::move(ps)}; }
};

/// Odd numerators at level n selected by the filter, ascending.
std::vector<long long> select_labels(const LabelFilter& filter, int n);

struct ShrinkRow {
  long long p = 0;
  int n = 0;
  Complex tip;
  double diameter = 0.0;
  unsigned flags = 0;
};

struct LevelSummary {
  int n = 0;
  std::size_t count = 0;
  double max_diameter = 0.0;
  long long argmax_p = 0;
  unsigned flags = 0;
};

struct ShrinkTable {
  std::vector<ShrinkRow> rows;  // sorted by (n, p)
  std::vector<LevelSummary> levels;
};

ShrinkTable shrink_experiment(const ModelTriangle& t, int n_first, int n_last, const LabelFilter& filter, int density,
                              const CarrotOptions& opt = {}, int parallelism = 1);

}  // namespace carrots
