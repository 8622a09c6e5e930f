#pragma once

// Exact angle arithmetic under the doubling map sigma(t) = 2t mod 1.
//
// Angles are reduced rationals in [0, 1). Binary itineraries are written
// ".HEAD(TAIL)", e.g. ".1(0)" for 1/2 and ".(01)" for 1/3.

#include <boost/multiprecision/gmp.hpp>

#include <compare>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace carrots {

using BigInt = boost::multiprecision::mpz_int;
using Rational = boost::multiprecision::mpq_rational;

class CombinatoricsError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class Angle {
 public:
  Angle() = default;
  /// num/den reduced modulo 1; den must be positive.
  Angle(BigInt num, BigInt den);
  Angle(long long num, long long den) : Angle(BigInt(num), BigInt(den)) {}
  explicit Angle(const Rational& r);

  /// Parses "p/q" or a plain integer.
  static Angle parse(std::string_view text);

  const BigInt& numerator() const { return num_; }
  const BigInt& denominator() const { return den_; }
  Rational rational() const { return Rational(num_, den_); }
  double to_double() const;
  bool is_zero() const { return num_ == 0; }
  std::string str() const;

  Angle doubled() const;

  friend bool operator==(const Angle&, const Angle&) = default;
  friend std::strong_ordering operator<=>(const Angle& a, const Angle& b);

 private:
  BigInt num_ = 0;
  BigInt den_ = 1;
};

inline Angle doubling(const Angle& theta) { return theta.doubled(); }

/// Preperiod and period of an angle under doubling (denominator 2^l * m, m odd).
struct OrbitShape {
  std::size_t preperiod = 0;
  std::size_t period = 1;
};
OrbitShape orbit_shape(const Angle& theta);

/// Forward orbit theta, sigma(theta), ... up to (excluding) the first repeat.
std::vector<Angle> forward_orbit(const Angle& theta);

struct BinaryItinerary {
  std::string head;
  std::string tail = "0";

  static BinaryItinerary parse(std::string_view text);
  std::string str() const;

  /// Exact value of .head(tail) modulo 1.
  Angle value() const;
  /// Exact value as a rational in [0, 1] (".(1)" evaluates to 1).
  Rational exact_value() const;
  /// value() == theta, decided by cross multiplication (no gcd).
  bool represents(const Angle& theta) const;

  /// Primitive tail, shortest head.
  BinaryItinerary normalized() const;

  /// Digit i of the infinite sequence (0-based).
  char digit(std::size_t i) const;

  friend bool operator==(const BinaryItinerary&, const BinaryItinerary&) = default;
};

/// Lexicographic order of the infinite 0/1 sequences.
std::strong_ordering lex_compare(const BinaryItinerary& a, const BinaryItinerary& b);

BinaryItinerary itinerary(const Angle& theta);

std::pair<BinaryItinerary, BinaryItinerary> dyadic_representations(long long p, int n);

/// Characteristic angles of the p/q wake of the main cardioid.
std::pair<Angle, Angle> wake_angles(int p, int q);

/// Rotation number of the (periodic) orbit of theta if the orbit is
/// cyclically ordered like a rigid rotation.
std::optional<std::pair<int, int>> rotation_number(const Angle& theta);

/// Rotation number of sigma^step acting on the angles
/// {theta, sigma^step(theta), ...} (used for satellite internal angles).
std::optional<std::pair<int, int>> rotation_number(const Angle& theta, std::size_t step);

struct TuningWords {
  std::string word0;
  std::string word1;

  TuningWords() = default;
  TuningWords(std::string w0, std::string w1);
  static TuningWords identity() { return {"0", "1"}; }
  std::size_t period() const { return word0.size(); }
};

Angle tune(const TuningWords& words, const BinaryItinerary& address);
Rational tune_exact(const TuningWords& words, const BinaryItinerary& address);

std::pair<Angle, Angle> decoration_wake_angles(const TuningWords& words, long long p, int n);

struct Dyadic {
  BigInt p;
  int m = 0;
  Rational value() const;
};

/// Smallest m with some p/2^m in the closed interval [a, b]; smallest p on ties.
Dyadic smallest_denominator_dyadic(const Rational& a, const Rational& b);

/// Hyperbolic component described by its tuning data.
struct ComponentDescriptor {
  int period = 1;
  TuningWords words = TuningWords::identity();
  Rational theta_minus = 0;
  Rational theta_plus = 1;
  int m_prime = 1;

  static ComponentDescriptor main_cardioid();
  /// Derives theta+- and m' from the tuning words.
  static ComponentDescriptor from_words(const TuningWords& words);
  /// The p/q satellite of `parent` (angles tuned through the parent's words).
  static ComponentDescriptor satellite(const ComponentDescriptor& parent, int p, int q);
  static ComponentDescriptor basilica() { return satellite(main_cardioid(), 1, 2); }

  bool is_main_cardioid() const { return period == 1; }
};

/// Parameter angles eta- < eta+ bounding the relative p/q wake of H.
std::pair<Angle, Angle> relative_wake_angles(const ComponentDescriptor& h, int p, int q);

struct WakePropositionReport {
  Angle eta_minus;
  Angle eta_plus;
  Rational gap;
  Rational lower_bound;  // 2^{-kq}
  int m = 0;
  int expected_m = 0;    // m' + k(q - 2)
  bool gap_ok = false;
  bool m_ok = false;
  bool pass() const { return gap_ok && m_ok; }
};

WakePropositionReport check_wake_proposition(const ComponentDescriptor& h, int p, int q);

/// True iff no point of the forward orbits of a and b lies in the open
/// interval ]min(a,b), max(a,b)[.
bool orbit_avoids_interval(const Angle& a, const Angle& b);

/// "p/q" parsing helper shared by the CLI and tests.
std::pair<int, int> parse_fraction(std::string_view text);

}  // namespace carrots
