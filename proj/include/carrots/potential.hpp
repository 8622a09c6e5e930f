#pragma once

// Green's functions, Boettcher coordinates and Newton solvers for
// Q_c(z) = z^2 + c.

#include "carrots/scalar.hpp"

#include <stdexcept>
#include <string>

namespace carrots {

struct PotentialOptions {
  double escape_radius = 1e8;
  int max_iterations = 2048;
};

class PotentialError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Newton did not reach its tolerance; carries the last iterate.
class NewtonFailure : public PotentialError {
 public:
  NewtonFailure(const std::string& what, Complex last, double residual)
      : PotentialError(what), last_iterate(last), residual(residual) {}
  Complex last_iterate;
  double residual;
};

struct PotentialResult {
  double value = 0.0;  // 0 when the orbit did not escape within the budget
  int iterations_used = 0;
  double error_bound = 0.0;
  bool escaped = false;
};

PotentialResult green_dynamic(Complex c, Complex z, double target_error = 1e-15, const PotentialOptions& opt = {});
PotentialResult green_param(Complex c, double target_error = 1e-15, const PotentialOptions& opt = {});

struct LogBottcher {
  Complex value;  // real part: potential, imaginary part in [0, 2 pi)
  double error_bound = 0.0;
  bool valid = false;
};

/// Log phi_c(z), defined when g_c(z) > g_c(0).
LogBottcher log_bottcher_dynamic(Complex c, Complex z, const PotentialOptions& opt = {});
/// Log Phi(c) = Log phi_c(c); invalid for c in M (for the budget).
LogBottcher log_bottcher_param(Complex c, const PotentialOptions& opt = {});

struct PhiValue {
  Complex value;
  Complex derivative;
};

/// Phi(c) = phi_c(c) and dPhi/dc. Throws PotentialError when c does not escape.
PhiValue phi_param(Complex c, const PotentialOptions& opt = {});

/// Solves Phi(c) = w by Newton from `seed`; |Phi(c) - w| <= 1e-12 |w| on return.
Complex psi_param(Complex w, Complex seed, const PotentialOptions& opt = {});

struct PeriodicPoint {
  Complex z;
  Complex multiplier;  // of the requested period k
  int exact_period = 0;
  double residual = 0.0;
};

/// Newton on Q_c^k(z) = z. exact_period < k reports a cycle of a divisor period.
PeriodicPoint periodic_point(Complex c, int k, Complex seed, double tol = 1e-12);

/// ln|lambda| + i a with a = arg(lambda) taken in [2 pi p/q - pi, 2 pi p/q + pi).
Complex multiplier_log_branch(Complex lambda, int p, int q);

/// Newton on c -> Q_c^k(0).
Complex component_center(int k, Complex seed, double tol = 1e-12);

/// Joint Newton in (z, c) on Q_c^k(z) = z, (Q_c^k)'(z) = mu.
struct CycleSolution {
  Complex z;
  Complex c;
  double residual = 0.0;
  bool converged = false;
};
CycleSolution solve_cycle_with_multiplier(int k, Complex mu, Complex z_seed, Complex c_seed, int max_iter = 60);

/// Parameter with an attracting k-cycle of multiplier mu (|mu| <= 1),
/// continued from the center c0 (mu = 0). Returns c and a point of the cycle.
struct InteriorPoint {
  Complex c;
  Complex z;
};
InteriorPoint component_point(int k, Complex center, Complex mu);

}  // namespace carrots
