#pragma once

// External rays by potential continuation in the dynamical plane of Q_c
// and in the parameter plane, plus landing estimates.

#include "carrots/combinatorics.hpp"
#include "carrots/potential.hpp"
#include "carrots/scalar.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace carrots {

enum class Plane { dynamical, parameter };

std::string_view to_string(Plane p);

namespace trace_flags {
inline constexpr unsigned escalated = 1u;   // switched to double-double on the way
inline constexpr unsigned truncated = 2u;   // continuation failed before h_min
inline constexpr unsigned no_landing = 4u;  // samples do not contract
inline constexpr unsigned unrefined = 8u;   // landing is extrapolated only
}  // namespace trace_flags

/// Renders flag bits as "escalated|truncated", or "ok".
std::string describe_flags(unsigned flags);

struct TraceOptions {
  double h0 = 2.0;
  double h_min = std::ldexp(1.0, -30);
  int steps_per_halving = 8;
  /// Accepted |Log phi(x) - target| relative to the target potential.
  double tolerance = 1e-6;
  Precision precision = Precision::standard;
  bool escalate = true;
  bool refine_landing = true;
  PotentialOptions potential;
};

struct RaySample {
  double h = 0.0;
  Complex point;
};

struct Landing {
  Complex point;
  double error = 0.0;
  bool detected = false;
  bool refined = false;
};

struct RayTrace {
  Plane plane = Plane::parameter;
  Complex c;  // dynamical plane only
  Angle angle;
  std::vector<RaySample> samples;
  std::optional<Landing> landing;
  unsigned flags = 0;
  int steps_per_halving = 8;

  bool truncated() const { return (flags & trace_flags::truncated) != 0; }
};

RayTrace trace_dynamic_ray(Complex c, const Angle& theta, const TraceOptions& opt = {});
RayTrace trace_param_ray(const Angle& theta, const TraceOptions& opt = {});

/// Aitken extrapolation over the last four samples one halving apart.
/// Traces with too few samples return the last point with the last step as error.
Landing estimate_landing(const RayTrace& trace);

/// Polishes an extrapolated landing with the exact periodic or preperiodic
/// equation the landing point satisfies; returns the estimate unchanged
/// (refined = false) when no candidate is close enough.
Landing refine_landing(Plane plane, Complex c, const Angle& theta, const Landing& estimate);

class ColandingFailure : public std::runtime_error {
 public:
  ColandingFailure(const std::string& what, Complex minus, Complex plus)
      : std::runtime_error(what), landing_minus(minus), landing_plus(plus) {}
  Complex landing_minus;
  Complex landing_plus;
};

struct Colanding {
  Complex alpha;
  Complex multiplier;  // of Q_c^k at alpha
  int period = 0;      // exact period of alpha
  double residual = 0.0;
  Complex landing_minus;
  Complex landing_plus;
};

/// Common landing point of the dynamical rays eta- and eta+ for Q_c.
Colanding colanding_point(Complex c, const Angle& eta_minus, const Angle& eta_plus, int k,
                          const TraceOptions& opt = {});

struct EquipotentialArc {
  Plane plane = Plane::parameter;
  Complex c;
  double h = 0.0;
  std::vector<Complex> points;
  std::vector<bool> ok;
};

EquipotentialArc equipotential(Plane plane, Complex c, double h, int n_samples, const TraceOptions& opt = {});

/// A point h + 2 pi i (theta + offset) in logarithmic coordinates, theta
/// being the shared base angle of a path.
struct LogPoint {
  double h = 0.0;
  double offset = 0.0;
};

struct PathImage {
  std::vector<Complex> points;
  std::vector<bool> ok;
  unsigned flags = 0;
};

/// Maps a polyline of log coordinates through the inverse Boettcher map
/// (psi_c or Psi): first down the ray through the first point, then along
/// the polyline with adaptive substeps. Points after a failure are marked.
PathImage map_log_path(Plane plane, Complex c, const Angle& base, const std::vector<LogPoint>& path,
                       const TraceOptions& opt = {});

}  // namespace carrots
