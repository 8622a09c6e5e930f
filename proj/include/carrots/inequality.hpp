#pragma once

// Yoccoz and Levin-Yoccoz inequalities for the multiplier of the landing
// point of a wake's bounding rays, the torus moduli behind them, and the
// limb scaling experiment.

#include "carrots/combinatorics.hpp"
#include "carrots/rays.hpp"

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace carrots {

class InequalityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unsigned angle under which i 2pi [eta-, eta+] is seen from P, Re P > 0.
double angle_of_vision(Complex P, const Angle& eta_minus, const Angle& eta_plus);

/// Lower bound arctan(2 pi 2^(m' - 2k)) on the angle of vision inside W^H.
double vision_floor(const ComponentDescriptor& h);

struct ModulusPair {
  double mod_T_gamma = 0.0;
  double mod_A_o = 0.0;
};

/// mod(T, gamma) = 2 pi cos(arg L) / (q |L|) with L = q Lambda - 2 pi i p,
/// mod(A_o) = pi / (k q ln 2).
ModulusPair torus_moduli(Complex Lambda, int p, int q, int k);

struct InequalityOptions {
  TraceOptions trace;
  double slack_relative = 1e-9;
  double slack_absolute = 1e-12;
  bool classical = false;  // omega = pi even outside M
};

struct InequalityReport {
  Complex c;
  ComponentDescriptor component;
  int p = 0;
  int q = 1;
  Angle eta_minus;
  Angle eta_plus;
  Complex alpha_prime;
  Complex lambda;
  Complex Lambda;
  double theta = 0.0;  // arg(Lambda - 2 pi i p/q)
  double omega = 0.0;
  bool outside_m = false;      // omega came from Log phi_c(c)
  Complex log_phi;             // strip representative, when outside_m
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  bool pass = false;
  bool repelling = true;       // |lambda| > 1; otherwise a boundary case
  ModulusPair moduli;
  double colanding_residual = 0.0;

  double margin() const { return rhs - lhs; }
  /// A failure that is not explained by a boundary case.
  bool violation() const { return !pass && repelling; }
};

/// Throws ColandingFailure when the rays eta+- do not co-land for Q_c.
InequalityReport yoccoz_levin_check(Complex c, const ComponentDescriptor& h, int p, int q,
                                    const InequalityOptions& opt = {});

/// Classical form: mod(A_o) <= mod(T, gamma).
bool grotzsch_holds(const ModulusPair& m, double slack = 1e-9);

struct LimbRow {
  int p = 0;
  int q = 0;
  Angle eta_minus;
  Angle eta_plus;
  Complex root;
  double extent = 0.0;
  double scaled = 0.0;  // extent * q
  std::size_t tips = 0;
  unsigned flags = 0;
};

struct LimbTable {
  std::vector<LimbRow> rows;  // sorted by (q, p)
  double empirical_c = 0.0;   // max of extent * q
  /// max over q of (max over p of extent * q) divided by the min over q.
  double spread = 0.0;
};

struct LimbOptions {
  TraceOptions trace;
  double h_probe = 0.0625;
  /// Dyadic tips are taken for levels up to (smallest level in the wake) + this.
  int extra_levels = 3;
};

LimbTable limb_scaling_experiment(const ComponentDescriptor& h, int q_max, const LimbOptions& opt = {},
                                  int parallelism = 1);

/// Sample parameters in the p/q wake of the main cardioid.
struct WakeSample {
  enum class Kind { center, interior, stick };
  Kind kind = Kind::center;
  Complex c;
  int p = 0;
  int q = 1;
  int period = 1;  // of the component, for centers and interior points
};

const char* to_string(WakeSample::Kind kind);

/// Centers of the p/q satellite and of its small satellites, random interior
/// points of those components, and points on dyadic sticks inside the wake.
/// Deterministic in `seed`.
std::vector<WakeSample> sample_wake(int p, int q, int count, std::uint64_t seed);

/// Center of the p/q satellite of the period-k component centered at `center`.
Complex satellite_center(int k, Complex center, int p, int q);

}  // namespace carrots
